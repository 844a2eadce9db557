#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "drifterm/weights.hpp"

namespace drifterm {

enum class MixingKind { Exact, AnalyticBound };

/// Summability certificate for the rho-mixing sequence, used to bound the
/// tail of 1 + 2 sum_k rho(k) after truncation.
struct RhoTail {
  enum class Kind { Finite, Geometric, Polynomial, Unknown };
  Kind kind = Kind::Unknown;
  int support = 0;     ///< Finite: rho(k) == 0 for k > support
  double scale = 1.0;  ///< Geometric/Polynomial: rho(k) <= scale * decay(k)
  double rate = 0.0;   ///< Geometric ratio q < 1, or polynomial exponent a > 1

  static RhoTail finite(int support) { return {Kind::Finite, support, 0.0, 0.0}; }
  static RhoTail geometric(double scale, double ratio) {
    return {Kind::Geometric, 0, scale, ratio};
  }
  static RhoTail polynomial(double scale, double exponent) {
    return {Kind::Polynomial, 0, scale, exponent};
  }
};

class MixingProfile {
 public:
  using Coefficient = std::function<double(int)>;

  MixingProfile(Coefficient beta, Coefficient rho, RhoTail tail, MixingKind kind);

  double beta(int lag) const { return beta_(lag); }
  double rho(int lag) const { return rho_(lag); }
  const RhoTail& tail() const { return tail_; }
  MixingKind kind() const { return kind_; }
  /// 1 + 2 sum rho(k), evaluated at construction; nullopt if not summable.
  const std::optional<double>& k_rho() const { return k_rho_; }

 private:
  Coefficient beta_;
  Coefficient rho_;
  RhoTail tail_;
  MixingKind kind_;
  std::optional<double> k_rho_;
};

MixingProfile iid_profile();

/// Gaussian AR(1) core. rho(k) = |phi|^k is the Gaussian maximal-correlation
/// identity. beta is the envelope min(1, c * decay^k); when not given,
/// c = 1 / (2 sqrt(1 - phi^2)) and decay = |phi|, which follows from
/// Pinsker's inequality applied to the k-step Gaussian transition.
MixingProfile ar1_profile(double phi, std::optional<double> beta_scale = std::nullopt,
                          std::optional<double> beta_decay = std::nullopt);

/// Finite-state Markov chain. beta is exact; rho is the second singular value
/// of D^{1/2} P^k D^{-1/2} at the stationary law. `initial` defaults to the
/// stationary distribution.
MixingProfile markov_profile(const Eigen::MatrixXd& transition,
                             std::optional<Eigen::VectorXd> initial = std::nullopt);

/// Arbitrary beta sequence with independent-looking correlations (rho = 0 for
/// k >= 1); used for beta-only computations such as m_beta.
MixingProfile beta_only_profile(MixingProfile::Coefficient beta);

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition);

/// Throws std::domain_error unless square with nonnegative rows summing to 1.
void validate_stochastic(const Eigen::MatrixXd& transition);

/// sup_t (1/2) sum_i P(X_t = i) sum_j |P^k_ij - P(X_{t+k} = j)|. The sup over
/// t runs until the marginal stops moving (or max_time steps).
double beta_markov_exact(const Eigen::MatrixXd& transition,
                         const Eigen::VectorXd& initial, int k,
                         int max_time = 100000);

/// Maximal correlation at lag k for the stationary chain.
double rho_markov_exact(const Eigen::MatrixXd& transition, int k);

struct MBeta {
  int m = 1;
  bool found = true;  ///< false: no m <= n satisfies (n/m) beta(m) <= delta
};

/// Smallest m in 1..n with (n/m) beta(m) <= delta.
MBeta m_beta(const MixingProfile& profile, int n, double delta);

inline constexpr double kRhoTruncationTol = 1e-10;

/// 1 + 2 sum rho(k) as an upper bound: partial sum plus the analytic tail
/// bound, truncated once the tail bound drops below tol times the running
/// value. Throws std::domain_error if the tail cannot be bounded.
double k_rho(const MixingProfile& profile, double truncation_tol = kRhoTruncationTol);

/// Alternating-block layout for the coupling argument; n is padded with
/// zero-weight observations up to a multiple of 2m.
struct BlockScheme {
  int m = 1;
  int n = 1;
  double delta = 0.05;

  int padded_n() const { return ((n + 2 * m - 1) / (2 * m)) * (2 * m); }
  int block_count() const { return padded_n() / m; }
};

/// 4 exp(-s^2 / (8 v ||w||^2 K_rho + 3 m b ||w||_inf s)), capped at 1.
double blocked_bernstein_tail(double v, double b, int m, const WeightVector& w,
                              double k_rho, double s);

}  // namespace drifterm
