#include "drifterm/processes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "drifterm/random.hpp"

namespace drifterm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double clamp_unit(double u) { return std::clamp(u, 0.0, std::nextafter(1.0, 0.0)); }

// Maps a latent uniform in [0, 1) to one covariate coordinate.
double covariate_from_uniform(CovariateLaw law, double u, int p) {
  switch (law) {
    case CovariateLaw::UniformCube: return (2.0 * u - 1.0) / std::sqrt(static_cast<double>(p));
    case CovariateLaw::UnitInterval: return u;
    case CovariateLaw::Constant: return 1.0;
  }
  return 0.0;
}

// Variance of clamp(N(0,1), -a, a).
double winsorized_normal_sd() {
  const double a = kNoiseTruncation;
  const double density = std::exp(-0.5 * a * a) / std::sqrt(kTwoPi);
  const double inside = std::erf(a / std::numbers::sqrt2);
  const double var = inside - 2.0 * a * density + a * a * (1.0 - inside);
  return std::sqrt(var);
}

}  // namespace

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::DriftingLinear: return "drifting_linear";
    case ProcessKind::DriftingVariance: return "drifting_variance";
    case ProcessKind::RegimeSwitch: return "regime_switch";
  }
  return "unknown";
}

std::string_view to_string(CovariateLaw law) {
  switch (law) {
    case CovariateLaw::UniformCube: return "uniform_cube";
    case CovariateLaw::UnitInterval: return "unit_interval";
    case CovariateLaw::Constant: return "constant";
  }
  return "unknown";
}

std::string_view to_string(FeatureMap map) {
  return map == FeatureMap::Identity ? "identity" : "lipschitz_sine";
}

std::string_view to_string(DriftPath::Shape shape) {
  switch (shape) {
    case DriftPath::Shape::Constant: return "constant";
    case DriftPath::Shape::Linear: return "linear";
    case DriftPath::Shape::Switch: return "switch";
    case DriftPath::Shape::Sinusoidal: return "sinusoidal";
  }
  return "unknown";
}

std::string_view to_string(DependenceCore::Kind kind) {
  switch (kind) {
    case DependenceCore::Kind::Iid: return "iid";
    case DependenceCore::Kind::AR1: return "ar1";
    case DependenceCore::Kind::Markov2: return "markov";
  }
  return "unknown";
}

ProcessKind parse_process_kind(std::string_view name) {
  if (name == "drifting_linear") return ProcessKind::DriftingLinear;
  if (name == "drifting_variance") return ProcessKind::DriftingVariance;
  if (name == "regime_switch") return ProcessKind::RegimeSwitch;
  throw std::invalid_argument("unknown process kind: " + std::string(name));
}

CovariateLaw parse_covariate_law(std::string_view name) {
  if (name == "uniform_cube") return CovariateLaw::UniformCube;
  if (name == "unit_interval") return CovariateLaw::UnitInterval;
  if (name == "constant") return CovariateLaw::Constant;
  throw std::invalid_argument("unknown covariate law: " + std::string(name));
}

FeatureMap parse_feature_map(std::string_view name) {
  if (name == "identity") return FeatureMap::Identity;
  if (name == "lipschitz_sine") return FeatureMap::LipschitzSine;
  throw std::invalid_argument("unknown feature map: " + std::string(name));
}

DriftPath::Shape parse_drift_shape(std::string_view name) {
  if (name == "constant") return DriftPath::Shape::Constant;
  if (name == "linear") return DriftPath::Shape::Linear;
  if (name == "switch") return DriftPath::Shape::Switch;
  if (name == "sinusoidal") return DriftPath::Shape::Sinusoidal;
  throw std::invalid_argument("unknown drift shape: " + std::string(name));
}

DependenceCore::Kind parse_core_kind(std::string_view name) {
  if (name == "iid") return DependenceCore::Kind::Iid;
  if (name == "ar1") return DependenceCore::Kind::AR1;
  if (name == "markov") return DependenceCore::Kind::Markov2;
  throw std::invalid_argument("unknown dependence core: " + std::string(name));
}

Eigen::VectorXd DriftPath::at(int t, int n) const {
  const double s = n > 0 ? static_cast<double>(t - 1) / n : 0.0;
  switch (shape) {
    case Shape::Constant: return start;
    case Shape::Linear: return start + s * (end - start);
    case Shape::Switch: {
      const int cut = switch_time > 0 ? switch_time : n / 2;
      return t <= cut ? start : end;
    }
    case Shape::Sinusoidal: {
      const double phase = 0.5 * (1.0 - std::cos(kTwoPi * (t - 1) / period));
      return start + phase * (end - start);
    }
  }
  return start;
}

Eigen::MatrixXd DependenceCore::markov_transition() const {
  Eigen::MatrixXd transition(2, 2);
  transition << 1.0 - flip, flip, flip, 1.0 - flip;
  return transition;
}

MixingProfile DependenceCore::profile() const {
  switch (kind) {
    case Kind::Iid: return iid_profile();
    case Kind::AR1: return ar1_profile(phi);
    case Kind::Markov2: return markov_profile(markov_transition());
  }
  return iid_profile();
}

double lipschitz_sine(double z) { return std::sin(kTwoPi * z) / kTwoPi; }

Eigen::VectorXd feature(FeatureMap map, const Eigen::Ref<const Eigen::RowVectorXd>& z) {
  if (map == FeatureMap::Identity) return z.transpose();
  Eigen::VectorXd out(1);
  out[0] = lipschitz_sine(z[0]);
  return out;
}

double truncated_normal_sd() {
  const double a = kNoiseTruncation;
  const double density = std::exp(-0.5 * a * a) / std::sqrt(kTwoPi);
  const double mass = std::erf(a / std::numbers::sqrt2);
  return std::sqrt(1.0 - 2.0 * a * density / mass);
}

double noise_half_width(double sd) { return kNoiseTruncation / truncated_normal_sd() * sd; }

Eigen::MatrixXd covariate_second_moment(CovariateLaw law, int p) {
  switch (law) {
    case CovariateLaw::UniformCube:
      return Eigen::MatrixXd::Identity(p, p) / (3.0 * p);
    case CovariateLaw::UnitInterval:
      return Eigen::MatrixXd::Constant(1, 1, 1.0 / 3.0);
    case CovariateLaw::Constant:
      return Eigen::MatrixXd::Constant(1, 1, 1.0);
  }
  return {};
}

Eigen::MatrixXd feature_second_moment(const ProcessSpec& spec) {
  if (spec.feature == FeatureMap::Identity) return covariate_second_moment(spec.law, spec.p);
  // E[sin^2(2 pi U)] / (2 pi)^2 = 1 / (8 pi^2) for U uniform on [0, 1).
  return Eigen::MatrixXd::Constant(1, 1, 1.0 / (2.0 * kTwoPi * kTwoPi));
}

double target_sup(const ProcessSpec& spec, const Eigen::VectorXd& coeffs) {
  if (spec.feature == FeatureMap::LipschitzSine) return std::abs(coeffs[0]) / kTwoPi;
  switch (spec.law) {
    case CovariateLaw::UniformCube:
      return coeffs.lpNorm<1>() / std::sqrt(static_cast<double>(spec.p));
    case CovariateLaw::UnitInterval:
    case CovariateLaw::Constant:
      return std::abs(coeffs[0]);
  }
  return 0.0;
}

double noise_variance(const ProcessSpec& spec, int t) {
  const double start = spec.noise_sd * spec.noise_sd;
  if (!spec.noise_var_end) return start;
  const double s = static_cast<double>(t - 1) / spec.n;
  return start + s * (*spec.noise_var_end - start);
}

Eigen::VectorXd drift_at(const ProcessSpec& spec, int t) {
  if (t < 1 || t > spec.n + 1) throw std::out_of_range("time index outside 1..n+1");
  return spec.drift.at(t, spec.n);
}

void ProcessSpec::validate() const {
  if (n < 1 || p < 1) throw std::domain_error("process needs n >= 1 and p >= 1");
  if (!(bound > 0.0)) throw std::domain_error("response bound B must be positive");
  if ((law == CovariateLaw::UnitInterval || law == CovariateLaw::Constant) && p != 1)
    throw std::domain_error("unit-interval and constant covariate laws require p = 1");
  if (feature == FeatureMap::LipschitzSine && law != CovariateLaw::UnitInterval)
    throw std::domain_error("the sine feature map lives on the unit interval");
  if (drift.start.size() != feature_dim())
    throw std::domain_error("drift start has the wrong dimension");
  if (drift.shape != DriftPath::Shape::Constant && drift.end.size() != feature_dim())
    throw std::domain_error("drift end has the wrong dimension");
  if (drift.shape == DriftPath::Shape::Sinusoidal && !(drift.period > 0.0))
    throw std::domain_error("sinusoidal drift needs a positive period");
  if (!(noise_sd >= 0.0) || (noise_var_end && !(*noise_var_end >= 0.0)))
    throw std::domain_error("noise scale must be nonnegative");
  if (kind == ProcessKind::DriftingVariance && drift.shape != DriftPath::Shape::Constant)
    throw std::domain_error("drifting-variance processes keep a constant mean");
  if (kind == ProcessKind::RegimeSwitch && drift.shape != DriftPath::Shape::Switch)
    throw std::domain_error("regime-switch processes need a switch drift");
  switch (core.kind) {
    case DependenceCore::Kind::Iid: break;
    case DependenceCore::Kind::AR1:
      if (!(std::abs(core.phi) < 1.0)) throw std::domain_error("AR(1) core needs |phi| < 1");
      break;
    case DependenceCore::Kind::Markov2:
      if (!(core.flip > 0.0 && core.flip < 1.0))
        throw std::domain_error("Markov core needs flip probability in (0, 1)");
      if (core.noise_follows_core)
        throw std::domain_error("dependent noise requires an AR(1) core");
      break;
  }
  for (int t = 1; t <= n + 1; ++t) {
    const Eigen::VectorXd beta = drift.at(t, n);
    if (feature == FeatureMap::Identity && beta.norm() > bound + 1e-12)
      throw std::domain_error("drift coefficient exceeds the norm bound B");
    const double sd = std::sqrt(noise_variance(*this, t));
    if (target_sup(*this, beta) + noise_half_width(sd) > bound + 1e-12)
      throw std::domain_error("noise support violates the |Y| <= B envelope at t = " +
                              std::to_string(t));
  }
}

ProcessSpec ProcessSpec::with_n(int new_n) const {
  ProcessSpec copy = *this;
  copy.n = new_n;
  return copy;
}

SamplePath simulate(const ProcessSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int len = spec.n + 1;
  const int p = spec.p;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  SamplePath path;
  path.seed = seed;
  path.spec = spec;
  path.y.resize(len);
  path.z.resize(len, p);

  const auto& core = spec.core;
  const double innovation_sd = std::sqrt(1.0 - core.phi * core.phi);
  Eigen::VectorXd latent(p);
  Eigen::VectorXi state(p);
  double noise_latent = 0.0;
  const double trunc_sd = truncated_normal_sd();
  const double winsor_sd = winsorized_normal_sd();

  for (int t = 1; t <= len; ++t) {
    const int row = t - 1;
    for (int j = 0; j < p; ++j) {
      double u = 0.0;
      switch (core.kind) {
        case DependenceCore::Kind::Iid:
          u = uniform(rng);
          break;
        case DependenceCore::Kind::AR1:
          latent[j] = t == 1 ? normal(rng) : core.phi * latent[j] + innovation_sd * normal(rng);
          u = normal_cdf(latent[j]);
          break;
        case DependenceCore::Kind::Markov2: {
          if (t == 1)
            state[j] = uniform(rng) < 0.5 ? 0 : 1;
          else if (uniform(rng) < core.flip)
            state[j] = 1 - state[j];
          u = 0.5 * (state[j] + uniform(rng));
          break;
        }
      }
      path.z(row, j) = covariate_from_uniform(spec.law, clamp_unit(u), p);
    }

    const double sd = std::sqrt(noise_variance(spec, t));
    double eta = 0.0;
    if (core.noise_follows_core) {
      noise_latent = t == 1 ? normal(rng) : core.phi * noise_latent + innovation_sd * normal(rng);
      eta = sd * std::clamp(noise_latent, -kNoiseTruncation, kNoiseTruncation) / winsor_sd;
    } else if (sd > 0.0) {
      double x = 0.0;
      do {
        x = normal(rng);
      } while (std::abs(x) > kNoiseTruncation);
      eta = sd * x / trunc_sd;
    }
    const Eigen::VectorXd beta = spec.drift.at(t, spec.n);
    path.y[row] = beta.dot(feature(spec.feature, path.z.row(row))) + eta;
  }
  return path;
}

Eigen::VectorXd population_optimum_w(const ProcessSpec& spec, const WeightVector& w) {
  if (w.size() > spec.n) throw std::domain_error("weights extend past the training horizon");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.feature_dim());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) out += w[i] * spec.drift.at(static_cast<int>(i) + 1, spec.n);
  }
  return out;
}

Eigen::VectorXd population_optimum_next(const ProcessSpec& spec, int t) {
  if (t < 0 || t + 1 > spec.n + 1) throw std::out_of_range("target time t + 1 exceeds n + 1");
  return spec.drift.at(t + 1, spec.n);
}

}  // namespace drifterm
