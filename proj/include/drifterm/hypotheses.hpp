#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "drifterm/processes.hpp"
#include "drifterm/weights.hpp"

namespace drifterm {

enum class HypothesisKind { LinearBall, StepBasis, ReluNet };

std::string_view to_string(HypothesisKind kind);
HypothesisKind parse_hypothesis_kind(std::string_view name);

struct HypothesisClassSpec {
  HypothesisKind kind = HypothesisKind::LinearBall;
  double bound = 1.0;        ///< B: ||beta|| <= B, bin values in [-B, B]
  int input_dim = 1;         ///< p
  int q = 1;                 ///< StepBasis bin count
  int width = 8;             ///< ReluNet neurons per hidden layer
  int layers = 1;            ///< ReluNet hidden layers
  double param_bound = 1.0;  ///< ReluNet box [-b, b] on every parameter
  double alpha = 0.0;        ///< covering exponent
  double c_inf = 0.0;        ///< C_inf in inf_P ||h - h'||_{L2(P)} >= C_inf ||h - h'||_inf

  void validate() const;
};

/// {z -> beta' z : ||beta|| <= B}; C_inf = sqrt(lambda_min(E[Z Z'])).
HypothesisClassSpec linear_ball_class(double bound, const Eigen::MatrixXd& second_moment);
/// q equal-width bins on [0, 1); C_inf = 1 / sqrt(q) under the uniform law.
HypothesisClassSpec step_basis_class(double bound, int q);
HypothesisClassSpec relu_net_class(double bound, int input_dim, int width, int layers,
                                   double param_bound = 1.0);

/// q(w) = ceil(||w||^{-2/3}); ||w|| must lie in (0, 1].
int basis_size(double w_l2);
/// Width nu with nu^2 l^2 ~ sizing_const * ceil(||w||^{-2/3}).
int relu_width_for(double w_l2, int layers, double sizing_const = 1.0);

struct LinearModel {
  Eigen::VectorXd beta;
};

struct StepModel {
  Eigen::VectorXd values;  ///< bin j covers [j/q, (j+1)/q)
  int bin_of(double z) const;
};

/// Fully connected ReLU network with a linear scalar output.
struct ReluNetwork {
  std::vector<Eigen::MatrixXd> hidden_weights;  ///< layer l: width x fan_in
  std::vector<Eigen::VectorXd> hidden_biases;
  Eigen::VectorXd out_weights;
  double out_bias = 0.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& z) const;
  double max_abs_parameter() const;
};

struct FitMeta {
  int iterations = 0;
  double empirical_risk = 0.0;
  double multiplier = 0.0;  ///< LinearBall: Lagrange multiplier of the norm constraint
  bool constrained = false;
};

struct FittedHypothesis {
  std::variant<LinearModel, StepModel, ReluNetwork> model;
  HypothesisClassSpec cls;
  FitMeta meta;

  HypothesisKind kind() const { return cls.kind; }
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& z) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& z) const;
};

/// Raised when signed weights leave the weighted Gram matrix without a
/// usable positive-definite part.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kGramFloorFactor = 1e-8;

struct NetTrainingOptions {
  double step = 0.05;
  int iterations = 5000;
};

/// Weighted ERM over the class, using observations 1..len(w) of the path.
/// LinearBall and StepBasis are exact; ReluNet is approximate (projected
/// gradient descent, best iterate kept).
FittedHypothesis fit_weighted_erm(const SamplePath& path, const WeightVector& w,
                                  const HypothesisClassSpec& cls, std::uint64_t seed = 0,
                                  NetTrainingOptions options = {});

/// Same on raw arrays: row i of z and y[i] are observation i + 1.
FittedHypothesis fit_weighted_erm(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& w, const HypothesisClassSpec& cls,
                                  std::uint64_t seed = 0, NetTrainingOptions options = {});

FittedHypothesis fit_linear_ball(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& w, const HypothesisClassSpec& cls);
FittedHypothesis fit_step_basis(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& w, const HypothesisClassSpec& cls);
FittedHypothesis fit_relu_net(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w, const HypothesisClassSpec& cls,
                              std::uint64_t seed, NetTrainingOptions options = {});

/// Sum_t w_t (y_t - h(z_t))^2.
double weighted_empirical_risk(const FittedHypothesis& h, const Eigen::MatrixXd& z,
                               const Eigen::VectorXd& y, const Eigen::VectorXd& w);

/// z -> coeffs' phi(z): the population regression function of a process.
struct TargetFunction {
  FeatureMap map = FeatureMap::Identity;
  Eigen::VectorXd coeffs;

  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& z) const;
};

/// int_a^b T(z) dz for a scalar target on the unit interval.
double target_integral(const TargetFunction& g, double a, double b);

enum class DistanceMode { Exact, MonteCarlo, Grid };
std::string_view to_string(DistanceMode mode);

struct DistanceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  DistanceMode mode = DistanceMode::Exact;
};

inline constexpr int kDefaultMcDraws = 100000;

struct McOptions {
  int draws = kDefaultMcDraws;
  std::uint64_t seed = 0x5eed;
};

/// Squared L2 distance E[(f(Z) - g(Z))^2] under the covariate law.
DistanceEstimate l2_distance(const FittedHypothesis& f, const TargetFunction& g,
                             CovariateLaw law, int p, McOptions mc = {});
DistanceEstimate l2_distance(const FittedHypothesis& f, const FittedHypothesis& g,
                             CovariateLaw law, int p, McOptions mc = {});

using Predictor = std::function<double(const Eigen::Ref<const Eigen::RowVectorXd>&)>;

/// Monte Carlo E[(f(Z) - g(Z))^2] with iid draws from the law.
DistanceEstimate l2_distance_mc(const Predictor& f, const Predictor& g, CovariateLaw law,
                                int p, McOptions mc = {});

Eigen::MatrixXd draw_covariates(CovariateLaw law, int p, int count, std::uint64_t seed);

/// Number of points used for grid-approximate sup distances.
inline constexpr int kSupGridPoints = 10000;

/// sup_z |f(z) - g(z)| over the covariate domain. Linear pairs use the unit
/// ball (||delta beta||_2); step functions against step functions or
/// against identity/sine targets are exact; anything involving a network is
/// evaluated on a grid over the law's support.
DistanceEstimate sup_distance(const FittedHypothesis& f, const TargetFunction& g,
                              CovariateLaw law, int p);
DistanceEstimate sup_distance(const FittedHypothesis& f, const FittedHypothesis& g,
                              CovariateLaw law, int p);

}  // namespace drifterm
