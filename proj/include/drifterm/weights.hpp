#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace drifterm {

enum class WeightFamily { UniformWindow, ExponentialSmoothing, BrownDES };

std::string_view to_string(WeightFamily family);
WeightFamily parse_weight_family(std::string_view name);

/// Default upper end R of the exponential-smoothing parameter domain (0, R).
inline constexpr double kDefaultExpUpper = 10.0;

/// One member of a weight family: the realized vector puts weight only on
/// indices 1..t of a length-n horizon.
///
/// `param` is the window length s for UniformWindow (integral, 1 <= s <= t),
/// the decay rate theta > 0 for ExponentialSmoothing and theta in (0, 1] for
/// BrownDES. theta = 1 is the degenerate Brown member with all mass on t.
struct WeightSpec {
  WeightFamily family = WeightFamily::UniformWindow;
  int t = 1;
  int n = 1;
  double param = 1.0;

  void validate() const;
};

/// Realized weight vector with cached norms. Indices are 0-based in
/// `entries`; entry i corresponds to time i + 1.
class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(WeightSpec spec, Eigen::VectorXd entries);

  const WeightSpec& spec() const { return spec_; }
  const Eigen::VectorXd& entries() const { return entries_; }
  Eigen::Index size() const { return entries_.size(); }
  double operator[](Eigen::Index i) const { return entries_[i]; }

  double l1() const { return l1_; }
  double l2sq() const { return l2sq_; }
  double l2() const { return std::sqrt(l2sq_); }
  double linf() const { return linf_; }
  double sum() const { return sum_; }
  double n_eff() const { return 1.0 / l2sq_; }
  bool signed_entries() const { return entries_.minCoeff() < 0.0; }

 private:
  WeightSpec spec_;
  Eigen::VectorXd entries_;
  double l1_ = 0.0;
  double l2sq_ = 0.0;
  double linf_ = 0.0;
  double sum_ = 0.0;
};

WeightVector make_weights(const WeightSpec& spec);

/// Uniform weights over the full horizon (window s = t = n).
WeightVector uniform_weights(int n);

/// Unnormalized Brown block value b_k(theta) = (2 - theta (k + 1)) (1 - theta)^k.
double brown_block(double theta, int lag);

/// Closed-form sum of b_0..b_{t-1}: (1 + r^t (t theta - 1)) / theta.
double brown_block_sum(double theta, int t);

/// ||w||_inf / ||w||^2 of the exponential member: (1 + rho) / (1 + rho^t).
double exp_spikiness(double theta, int t);

/// ||w||^2 of the exponential member, closed form.
double exp_l2sq(double theta, int t);

/// Decay rate theta whose exponential member over t points has
/// 1/||w||^2 == n_eff. Requires 1 < n_eff < t.
double exp_theta_for_neff(double n_eff, int t);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntRange {
  int lo = 1;
  int hi = 1;
};

struct WeightClassConstants {
  double c1 = 1.0;         ///< sup ||w||_1
  double cw = 1.0;         ///< inf ||w||_2
  double bw = 1.0;         ///< sup ||w||_inf / ||w||^2
  double n_eff_max = 1.0;  ///< 1 / cw^2
  bool exact = true;       ///< false when a supremum was taken over a grid
  int grid_points = 0;
};

/// Number of geometric grid points used for grid-approximate suprema.
inline constexpr int kClassGridPoints = 10000;
/// Open domain endpoints are approached to within this distance.
inline constexpr double kDomainEndpointGap = 1e-6;

/// Class constants over param_range x t_range. For UniformWindow the
/// parameter range is the window length range (clipped to s <= t).
WeightClassConstants class_constants(WeightFamily family, Interval param_range,
                                     IntRange t_range,
                                     int grid_points = kClassGridPoints);

/// Parameter grid whose weight vectors form an epsilon-cover in ||.||_1 of
/// the family at fixed t. Spacing follows the derivative bounds
/// ||dw/dtheta||_1 <= t - 1 (exponential) and <= 20 t (Brown).
std::vector<WeightSpec> build_weight_net(WeightFamily family,
                                         Interval param_range, int t, int n,
                                         double epsilon);

enum class CoverSelector { SingleT, UnionOverT };

/// Analytic upper bound on N_1(epsilon, W) for a single t, or the union over
/// t = 1..n (pass n as t_or_n). `exp_upper` is R for the exponential family.
/// Never below 1: a non-empty set needs at least one ball.
double covering_number_bound(WeightFamily family, CoverSelector selector,
                             int t_or_n, double epsilon,
                             double exp_upper = kDefaultExpUpper);

}  // namespace drifterm
