#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "drifterm/mixing.hpp"
#include "drifterm/weights.hpp"

namespace drifterm {

enum class ProcessKind { DriftingLinear, DriftingVariance, RegimeSwitch };

/// Marginal law of the covariates, fixed across time.
///   UniformCube:  uniform on [-1/sqrt(p), 1/sqrt(p)]^p, inside the unit ball
///   UnitInterval: uniform on [0, 1), p = 1
///   Constant:     Z == 1, p = 1 (constant predictors)
enum class CovariateLaw { UniformCube, UnitInterval, Constant };

/// Feature map phi with E[Y_t | Z = z] = beta*_t' phi(z).
///   Identity:      phi(z) = z
///   LipschitzSine: phi(z) = sin(2 pi z) / (2 pi), 1-Lipschitz on [0, 1)
enum class FeatureMap { Identity, LipschitzSine };

std::string_view to_string(ProcessKind kind);
std::string_view to_string(CovariateLaw law);
std::string_view to_string(FeatureMap map);
ProcessKind parse_process_kind(std::string_view name);
CovariateLaw parse_covariate_law(std::string_view name);
FeatureMap parse_feature_map(std::string_view name);

/// Coefficient path t -> beta*_t on t = 1..n+1, with s = (t - 1) / n.
struct DriftPath {
  enum class Shape { Constant, Linear, Switch, Sinusoidal };
  Shape shape = Shape::Constant;
  Eigen::VectorXd start;
  Eigen::VectorXd end;         ///< unused for Constant
  int switch_time = 0;         ///< Switch: start for t <= switch_time; 0 means n / 2
  double period = 0.0;         ///< Sinusoidal: period in time steps

  Eigen::VectorXd at(int t, int n) const;
};

std::string_view to_string(DriftPath::Shape shape);
DriftPath::Shape parse_drift_shape(std::string_view name);

/// Latent process generating the dependence. Z coordinates are monotone
/// transforms of independent copies of the core, so the marginal law stays
/// fixed and the mixing coefficients are those of the core.
struct DependenceCore {
  enum class Kind { Iid, AR1, Markov2 };
  Kind kind = Kind::Iid;
  double phi = 0.0;   ///< AR1 coefficient
  double flip = 0.5;  ///< Markov2: P(switch state) of the symmetric 2-state chain
  bool noise_follows_core = false;  ///< AR1 only: noise driven by its own AR(1) copy

  MixingProfile profile() const;
  Eigen::MatrixXd markov_transition() const;
};

std::string_view to_string(DependenceCore::Kind kind);
DependenceCore::Kind parse_core_kind(std::string_view name);

struct ProcessSpec {
  ProcessKind kind = ProcessKind::DriftingLinear;
  int n = 100;
  int p = 1;
  double bound = 1.0;  ///< B: ||beta*_t|| <= B and |Y_t| <= B
  DriftPath drift;
  double noise_sd = 0.0;                 ///< sigma at t = 1
  std::optional<double> noise_var_end;   ///< variance at t = n + 1, linear ramp in between
  CovariateLaw law = CovariateLaw::UniformCube;
  FeatureMap feature = FeatureMap::Identity;
  DependenceCore core;

  int feature_dim() const { return feature == FeatureMap::Identity ? p : 1; }
  void validate() const;
  /// Copy with a different horizon.
  ProcessSpec with_n(int new_n) const;
};

/// Truncated Gaussian noise: standard normal conditioned on |x| <= 4,
/// rescaled to unit variance.
inline constexpr double kNoiseTruncation = 4.0;
double truncated_normal_sd();
double noise_half_width(double sd);

/// Path of length n + 1; row t - 1 of z holds Z_t.
struct SamplePath {
  Eigen::VectorXd y;
  Eigen::MatrixXd z;
  std::uint64_t seed = 0;
  ProcessSpec spec;

  int n() const { return spec.n; }
};

SamplePath simulate(const ProcessSpec& spec, std::uint64_t seed);

/// beta*_t for t in 1..n+1.
Eigen::VectorXd drift_at(const ProcessSpec& spec, int t);
double noise_variance(const ProcessSpec& spec, int t);

/// E[Z Z'] of the covariate law.
Eigen::MatrixXd covariate_second_moment(CovariateLaw law, int p);
/// E[phi(Z) phi(Z)'] for the spec's feature map.
Eigen::MatrixXd feature_second_moment(const ProcessSpec& spec);

Eigen::VectorXd feature(FeatureMap map, const Eigen::Ref<const Eigen::RowVectorXd>& z);
double lipschitz_sine(double z);

/// sup over the covariate support of |c' phi(z)|.
double target_sup(const ProcessSpec& spec, const Eigen::VectorXd& coeffs);

/// beta*_w = sum_t w_t beta*_t over t = 1..len(w).
Eigen::VectorXd population_optimum_w(const ProcessSpec& spec, const WeightVector& w);

/// beta*_{t+1}; throws std::out_of_range if t + 1 > n + 1.
Eigen::VectorXd population_optimum_next(const ProcessSpec& spec, int t);

}  // namespace drifterm
