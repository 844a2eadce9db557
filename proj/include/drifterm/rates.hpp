#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "drifterm/hypotheses.hpp"
#include "drifterm/mixing.hpp"
#include "drifterm/weights.hpp"

namespace drifterm {

/// eps -> log N_1(eps, W).
using WeightCoverFn = std::function<double(double)>;
/// (eps, ||w||) -> log N_inf(eps, H_w).
using HypothesisCoverFn = std::function<double(double, double)>;

struct RateParameters {
  double c1 = 1.0;
  double cw = 1.0;
  double bw = 1.0;
  int m_beta = 1;
  double k_rho = 1.0;
  double c_p = 1.0;
  double c_inf = 0.0;
  double c_l = 1.0;
  double alpha = 0.0;
  double A = 1.0;
  std::optional<double> K;  ///< Lipschitz budget; defaults to A^2 n^2
  double delta = 0.05;
  double n = 1.0;  ///< horizon
  WeightCoverFn log_n1_w;
  HypothesisCoverFn log_ninf_h;

  double lipschitz_budget() const { return K ? *K : A * A * double(n) * double(n); }
  /// C_P^2 K_rho + m_beta B_W
  double c_beta_rho() const { return c_p * c_p * k_rho + m_beta * bw; }
  /// m_beta B_W C_P / C_inf (infinite when C_inf == 0)
  double c_beta_inf() const;
  void validate() const;
};

/// Raised when the side conditions of a closed-form rate do not hold.
class RatePreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// log of the analytic N_1 bound for a weight family (floored at 0).
WeightCoverFn weight_cover_log(WeightFamily family, CoverSelector selector, int t_or_n,
                               double exp_upper = kDefaultExpUpper);

/// p log(3B / eps) for the linear ball.
HypothesisCoverFn linear_cover_log(int p, double bound);
/// q(u) log(3B / eps) with q(u) = basis_size(u).
HypothesisCoverFn step_cover_log(double bound);
/// c u^{-2/3} log(n / eps) for networks sized from ||w||.
HypothesisCoverFn net_cover_log(int n, double sizing_const = 1.0);
HypothesisCoverFn singleton_cover_log();

HypothesisCoverFn cover_log_for(const HypothesisClassSpec& cls, int n);

/// epsilon_W = C_W^3 / (64 (1 + C_1 K)).
double eps_weights(const RateParameters& params);
/// epsilon_w = ||w||^2 / (32 C_1).
double eps_hypotheses(const RateParameters& params, double w_l2);

/// 4 + log N_1(eps_W) + 2 log N_inf(eps_w).
double kw(const RateParameters& params, double w_l2);

enum class RateVariant { PropFiveI, PropFiveII, Custom };

std::string_view to_string(RateVariant variant);
RateVariant parse_rate_variant(std::string_view name);  ///< "i", "ii"

struct RateFunction {
  RateVariant variant = RateVariant::Custom;
  RateParameters params;
  std::function<double(double)> evaluation;

  double operator()(double u) const { return evaluation(u); }
};

/// (i)  u^{1 - alpha/2} sqrt(A C_{beta,rho} log n)
/// (ii) u^{1 - alpha/2} sqrt(A C_P^2 K_rho log n) + A C_{beta,inf} u^{2 - alpha} log n
RateFunction rate_prop5(RateVariant variant, const RateParameters& params);

RateFunction custom_rate(const RateParameters& params, std::function<double(double)> r);

struct RateConditionPoint {
  double u = 0.0;
  double r = 0.0;
  double kw = 0.0;
  double rhs_variance = 0.0;  ///< right side of the variance condition
  double rhs_approx = 0.0;    ///< 4 C_L * approximation error
  bool pass_variance = false;
  bool pass_approx = false;
  double slack = 0.0;  ///< r^2 / max(rhs); >= 1 on a pass
};

struct RateConditionReport {
  std::vector<RateConditionPoint> points;
  double lipschitz = 0.0;  ///< max finite-difference slope on the grid
  double lipschitz_budget = 0.0;
  bool increasing = true;
  double min_slack = 0.0;
  bool pass = false;
};

/// w_l2 -> inf_{h in H_w} ||h - h*_w||_inf^2
using ApproxErrorFn = std::function<double(double)>;

inline ApproxErrorFn zero_approx_error() {
  return [](double) { return 0.0; };
}

/// Squared sup error of the best step function on q(u) bins for an
/// L-Lipschitz target: (L / (2 q(u)))^2.
ApproxErrorFn step_approx_error(double lipschitz = 1.0);

inline constexpr int kConditionGridPoints = 256;

/// kConditionGridPoints log-spaced interior points on [lo, hi] plus both endpoints.
std::vector<double> condition_grid(double lo, double hi, int points = kConditionGridPoints);

RateConditionReport check_rate_conditions(const RateFunction& r, const RateParameters& params,
                                          const ApproxErrorFn& approx_err,
                                          const std::vector<double>& grid);

struct RateSearch {
  double A = 1.0;
  int doublings = 0;
  RateFunction rate;
  RateConditionReport report;
};

/// Doubles A from 1 until the conditions pass on the grid. K follows A
/// unless params.K is set. Throws std::runtime_error after max_doublings.
RateSearch find_rate_constant(RateVariant variant, RateParameters params,
                              const ApproxErrorFn& approx_err, const std::vector<double>& grid,
                              int max_doublings = 64);

/// r(w_l2)^2 log^2(1/delta) + drift_term.
double bound_certificate(const RateFunction& r, double w_l2, double delta, double drift_term);

/// Parameters for a weight class, mixing profile and hypothesis class. C_P
/// and C_L are 1 (time-invariant covariate law, square loss).
RateParameters make_rate_parameters(const WeightClassConstants& weights, WeightCoverFn log_n1_w,
                                    const MixingProfile& mixing, const HypothesisClassSpec& cls,
                                    int n, double delta);

}  // namespace drifterm
