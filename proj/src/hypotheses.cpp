#include "drifterm/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "drifterm/random.hpp"

namespace drifterm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Antiderivatives of g(z) = sin(2 pi z) / (2 pi) and of g(z)^2.
double sine_integral(double z) { return -std::cos(kTwoPi * z) / (kTwoPi * kTwoPi); }
double sine_sq_integral(double z) {
  return (0.5 * z - std::sin(2.0 * kTwoPi * z) / (4.0 * kTwoPi)) / (kTwoPi * kTwoPi);
}

// int_a^b (c - T(z))^2 dz for a scalar target T on the unit interval.
double constant_vs_target_sq(double c, const TargetFunction& g, double a, double b) {
  const double k = g.coeffs[0];
  if (g.map == FeatureMap::Identity) {
    return c * c * (b - a) - c * k * (b * b - a * a) + k * k * (b * b * b - a * a * a) / 3.0;
  }
  return c * c * (b - a) - 2.0 * c * k * (sine_integral(b) - sine_integral(a)) +
         k * k * (sine_sq_integral(b) - sine_sq_integral(a));
}

// [min, max] of a scalar target on [a, b].
std::pair<double, double> target_range(const TargetFunction& g, double a, double b) {
  const double k = g.coeffs[0];
  if (g.map == FeatureMap::Identity) return std::minmax(k * a, k * b);
  double lo = std::min(lipschitz_sine(a), lipschitz_sine(b));
  double hi = std::max(lipschitz_sine(a), lipschitz_sine(b));
  for (double critical : {0.25, 0.75}) {
    if (critical > a && critical < b) {
      lo = std::min(lo, lipschitz_sine(critical));
      hi = std::max(hi, lipschitz_sine(critical));
    }
  }
  return k >= 0.0 ? std::make_pair(k * lo, k * hi) : std::make_pair(k * hi, k * lo);
}

// Sorted union of the bin edges of two step functions on [0, 1].
std::vector<double> merged_edges(int q1, int q2) {
  std::vector<double> edges;
  for (int j = 0; j <= q1; ++j) edges.push_back(static_cast<double>(j) / q1);
  for (int j = 0; j <= q2; ++j) edges.push_back(static_cast<double>(j) / q2);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-15; }),
              edges.end());
  return edges;
}

Eigen::MatrixXd support_grid(CovariateLaw law, int p, int points) {
  if (law == CovariateLaw::Constant) return Eigen::MatrixXd::Ones(1, 1);
  const double lo = law == CovariateLaw::UnitInterval ? 0.0 : -1.0 / std::sqrt(double(p));
  const double hi = law == CovariateLaw::UnitInterval ? 1.0 : 1.0 / std::sqrt(double(p));
  const int per_dim = std::max(2, static_cast<int>(std::ceil(std::pow(points, 1.0 / p))));
  long total = 1;
  for (int j = 0; j < p; ++j) total *= per_dim;
  Eigen::MatrixXd grid(total, p);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (int j = 0; j < p; ++j) {
      const long k = rest % per_dim;
      rest /= per_dim;
      // Half-open unit interval: stay strictly below 1.
      const double frac = law == CovariateLaw::UnitInterval
                              ? (k + 0.5) / per_dim
                              : static_cast<double>(k) / (per_dim - 1);
      grid(idx, j) = lo + frac * (hi - lo);
    }
  }
  return grid;
}

DistanceEstimate sup_on_grid(const Predictor& f, const Predictor& g, CovariateLaw law, int p) {
  const Eigen::MatrixXd grid = support_grid(law, p, kSupGridPoints);
  double best = 0.0;
  for (Eigen::Index i = 0; i < grid.rows(); ++i)
    best = std::max(best, std::abs(f(grid.row(i)) - g(grid.row(i))));
  return {best, 0.0, DistanceMode::Grid};
}

Predictor as_predictor(const FittedHypothesis& h) {
  return [&h](const Eigen::Ref<const Eigen::RowVectorXd>& z) { return h.predict(z); };
}

Predictor as_predictor(const TargetFunction& g) {
  return [&g](const Eigen::Ref<const Eigen::RowVectorXd>& z) { return g(z); };
}

}  // namespace

std::string_view to_string(HypothesisKind kind) {
  switch (kind) {
    case HypothesisKind::LinearBall: return "linear";
    case HypothesisKind::StepBasis: return "step";
    case HypothesisKind::ReluNet: return "relu";
  }
  return "unknown";
}

HypothesisKind parse_hypothesis_kind(std::string_view name) {
  if (name == "linear") return HypothesisKind::LinearBall;
  if (name == "step") return HypothesisKind::StepBasis;
  if (name == "relu") return HypothesisKind::ReluNet;
  throw std::invalid_argument("unknown hypothesis class: " + std::string(name));
}

std::string_view to_string(DistanceMode mode) {
  switch (mode) {
    case DistanceMode::Exact: return "exact";
    case DistanceMode::MonteCarlo: return "monte_carlo";
    case DistanceMode::Grid: return "grid";
  }
  return "unknown";
}

void HypothesisClassSpec::validate() const {
  if (!(bound > 0.0)) throw std::domain_error("class bound B must be positive");
  if (input_dim < 1) throw std::domain_error("input dimension must be positive");
  switch (kind) {
    case HypothesisKind::LinearBall: break;
    case HypothesisKind::StepBasis:
      if (q < 1) throw std::domain_error("step basis needs q >= 1");
      if (input_dim != 1) throw std::domain_error("step basis is one-dimensional");
      break;
    case HypothesisKind::ReluNet:
      if (width < 1 || layers < 1 || !(param_bound > 0.0))
        throw std::domain_error("ReLU net needs width, layers >= 1 and b > 0");
      break;
  }
}

HypothesisClassSpec linear_ball_class(double bound, const Eigen::MatrixXd& second_moment) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(second_moment, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (!(lambda_min > 0.0)) throw std::domain_error("covariate second moment must be positive definite");
  HypothesisClassSpec cls;
  cls.kind = HypothesisKind::LinearBall;
  cls.bound = bound;
  cls.input_dim = static_cast<int>(second_moment.rows());
  cls.alpha = 0.0;
  cls.c_inf = std::sqrt(lambda_min);
  cls.validate();
  return cls;
}

HypothesisClassSpec step_basis_class(double bound, int q) {
  HypothesisClassSpec cls;
  cls.kind = HypothesisKind::StepBasis;
  cls.bound = bound;
  cls.input_dim = 1;
  cls.q = q;
  cls.alpha = 2.0 / 3.0;
  cls.c_inf = 1.0 / std::sqrt(static_cast<double>(q));
  cls.validate();
  return cls;
}

HypothesisClassSpec relu_net_class(double bound, int input_dim, int width, int layers,
                                   double param_bound) {
  HypothesisClassSpec cls;
  cls.kind = HypothesisKind::ReluNet;
  cls.bound = bound;
  cls.input_dim = input_dim;
  cls.width = width;
  cls.layers = layers;
  cls.param_bound = param_bound;
  cls.alpha = 2.0 / 3.0;
  cls.c_inf = 0.0;
  cls.validate();
  return cls;
}

int basis_size(double w_l2) {
  if (!(w_l2 > 0.0) || w_l2 > 1.0) throw std::domain_error("||w|| must lie in (0, 1]");
  // The slack absorbs rounding in pow for exact cubes such as 512^{1/3}.
  return static_cast<int>(std::ceil(std::pow(w_l2, -2.0 / 3.0) - 1e-9));
}

int relu_width_for(double w_l2, int layers, double sizing_const) {
  const double target = sizing_const * basis_size(w_l2);
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(target) / layers - 1e-9)));
}

int StepModel::bin_of(double z) const {
  const auto q = static_cast<int>(values.size());
  return std::clamp(static_cast<int>(std::floor(z * q)), 0, q - 1);
}

Eigen::VectorXd ReluNetwork::predict(const Eigen::MatrixXd& z) const {
  Eigen::MatrixXd act = z;
  for (std::size_t l = 0; l < hidden_weights.size(); ++l) {
    act = ((act * hidden_weights[l].transpose()).rowwise() + hidden_biases[l].transpose())
              .cwiseMax(0.0);
  }
  return (act * out_weights).array() + out_bias;
}

double ReluNetwork::max_abs_parameter() const {
  double m = std::max(out_weights.cwiseAbs().maxCoeff(), std::abs(out_bias));
  for (const auto& w : hidden_weights) m = std::max(m, w.cwiseAbs().maxCoeff());
  for (const auto& b : hidden_biases) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

double FittedHypothesis::predict(const Eigen::Ref<const Eigen::RowVectorXd>& z) const {
  return std::visit(overloaded{
                        [&](const LinearModel& m) { return z.dot(m.beta.transpose()); },
                        [&](const StepModel& m) { return m.values[m.bin_of(z[0])]; },
                        [&](const ReluNetwork& m) { return m.predict(Eigen::MatrixXd(z))[0]; },
                    },
                    model);
}

Eigen::VectorXd FittedHypothesis::predict(const Eigen::MatrixXd& z) const {
  return std::visit(overloaded{
                        [&](const LinearModel& m) -> Eigen::VectorXd { return z * m.beta; },
                        [&](const StepModel& m) -> Eigen::VectorXd {
                          Eigen::VectorXd out(z.rows());
                          for (Eigen::Index i = 0; i < z.rows(); ++i)
                            out[i] = m.values[m.bin_of(z(i, 0))];
                          return out;
                        },
                        [&](const ReluNetwork& m) -> Eigen::VectorXd { return m.predict(z); },
                    },
                    model);
}

double weighted_empirical_risk(const FittedHypothesis& h, const Eigen::MatrixXd& z,
                               const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  return w.dot((y - h.predict(z)).array().square().matrix());
}

FittedHypothesis fit_linear_ball(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& w, const HypothesisClassSpec& cls) {
  cls.validate();
  if (z.cols() != cls.input_dim) throw std::domain_error("covariate dimension mismatch");
  const Eigen::Index p = z.cols();
  const Eigen::MatrixXd gram = z.transpose() * w.asDiagonal() * z;
  const Eigen::VectorXd moment = z.transpose() * w.cwiseProduct(y);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const Eigen::MatrixXd& basis = eig.eigenvectors();
  const double floor = kGramFloorFactor * std::abs(gram.trace()) / static_cast<double>(p);
  const bool signed_weights = (w.array() < 0.0).any();
  if (signed_weights && !(lambda.minCoeff() > floor))
    throw RankDeficientError("weighted Gram matrix has eigenvalue " +
                             std::to_string(lambda.minCoeff()) + " below floor " +
                             std::to_string(floor) + " under signed weights");

  const Eigen::VectorXd rotated = basis.transpose() * moment;
  const double tiny = 1e-14 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const double bound = cls.bound;

  auto norm_at = [&](double mu) {
    return (rotated.array() / (lambda.array() + mu)).matrix().norm();
  };

  // Interior candidate: pseudo-inverse solution, valid when the moment has no
  // component along (numerically) null directions.
  bool unbounded = false;
  Eigen::VectorXd coords = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (lambda[i] > tiny)
      coords[i] = rotated[i] / lambda[i];
    else if (std::abs(rotated[i]) > 1e-12 * std::max(1.0, moment.norm()))
      unbounded = true;
  }

  FittedHypothesis fit;
  fit.cls = cls;
  double mu = 0.0;
  if (!unbounded && coords.norm() <= bound) {
    fit.model = LinearModel{basis * coords};
  } else {
    // Boundary solution: ||(G + mu I)^{-1} c|| = B for the unique
    // mu > max(0, -lambda_min); the norm is decreasing in mu.
    double lo = std::max(0.0, -lambda.minCoeff());
    double hi = lo + moment.norm() / bound + 1.0;
    while (norm_at(hi) > bound) hi = lo + 2.0 * (hi - lo);
    for (int it = 0; it < 300; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (norm_at(mid) > bound)
        lo = mid;
      else
        hi = mid;
      ++fit.meta.iterations;
    }
    mu = hi;
    coords = (rotated.array() / (lambda.array() + mu)).matrix();
    fit.model = LinearModel{basis * coords};
    fit.meta.constrained = true;
  }
  fit.meta.multiplier = mu;
  fit.meta.empirical_risk = weighted_empirical_risk(fit, z, y, w);
  return fit;
}

FittedHypothesis fit_step_basis(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& w, const HypothesisClassSpec& cls) {
  cls.validate();
  const int q = cls.q;
  const double bound = cls.bound;
  Eigen::VectorXd num = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd den = Eigen::VectorXd::Zero(q);
  std::vector<bool> occupied(static_cast<std::size_t>(q), false);
  StepModel model{Eigen::VectorXd::Zero(q)};
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!(z[i] >= 0.0 && z[i] < 1.0)) throw std::domain_error("step basis covariates must lie in [0, 1)");
    if (w[i] == 0.0) continue;
    const int j = model.bin_of(z[i]);
    num[j] += w[i] * y[i];
    den[j] += w[i];
    occupied[static_cast<std::size_t>(j)] = true;
  }
  // Per bin the objective is den c^2 - 2 num c + const over c in [-B, B].
  for (int j = 0; j < q; ++j) {
    double c = 0.0;
    if (!occupied[static_cast<std::size_t>(j)]) {
      c = 0.0;
    } else if (den[j] > 1e-15) {
      c = std::clamp(num[j] / den[j], -bound, bound);
    } else if (std::abs(num[j]) > 1e-15) {
      c = num[j] > 0.0 ? bound : -bound;
    } else if (den[j] < -1e-15) {
      c = bound;
    }
    model.values[j] = c;
  }
  FittedHypothesis fit;
  fit.model = std::move(model);
  fit.cls = cls;
  fit.meta.empirical_risk = weighted_empirical_risk(fit, z, y, w);
  return fit;
}

FittedHypothesis fit_relu_net(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w, const HypothesisClassSpec& cls,
                              std::uint64_t seed, NetTrainingOptions options) {
  cls.validate();
  if (z.cols() != cls.input_dim) throw std::domain_error("covariate dimension mismatch");
  const double box = cls.param_bound;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto init = [&](Eigen::Index rows, Eigen::Index cols, double fan_in) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
      m.data()[i] = std::clamp(normal(rng) / std::sqrt(fan_in), -box, box);
    return m;
  };

  ReluNetwork net;
  Eigen::Index fan_in = z.cols();
  for (int l = 0; l < cls.layers; ++l) {
    net.hidden_weights.push_back(init(cls.width, fan_in, static_cast<double>(fan_in)));
    net.hidden_biases.push_back(Eigen::VectorXd::Zero(cls.width));
    fan_in = cls.width;
  }
  net.out_weights = init(cls.width, 1, static_cast<double>(cls.width)).col(0);

  const auto layers = static_cast<std::size_t>(cls.layers);
  std::vector<Eigen::MatrixXd> acts(layers + 1);
  ReluNetwork best = net;
  double best_risk = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (int it = 0; it <= options.iterations; ++it) {
    acts[0] = z;
    for (std::size_t l = 0; l < layers; ++l) {
      acts[l + 1] =
          ((acts[l] * net.hidden_weights[l].transpose()).rowwise() + net.hidden_biases[l].transpose())
              .cwiseMax(0.0);
    }
    const Eigen::VectorXd pred = (acts[layers] * net.out_weights).array() + net.out_bias;
    const Eigen::VectorXd resid = pred - y;
    const double risk = w.dot(resid.cwiseAbs2());
    if (risk < best_risk) {
      best_risk = risk;
      best = net;
    }
    if (it == options.iterations) break;
    ++iterations;

    const Eigen::VectorXd grad_out = 2.0 * w.cwiseProduct(resid);
    Eigen::MatrixXd delta = grad_out * net.out_weights.transpose();
    const Eigen::VectorXd step_out = acts[layers].transpose() * grad_out;
    const double step_bias = grad_out.sum();
    for (std::size_t l = layers; l-- > 0;) {
      delta = delta.cwiseProduct((acts[l + 1].array() > 0.0).cast<double>().matrix());
      const Eigen::MatrixXd grad_w = delta.transpose() * acts[l];
      const Eigen::VectorXd grad_b = delta.colwise().sum().transpose();
      if (l > 0) delta = delta * net.hidden_weights[l];
      net.hidden_weights[l] = (net.hidden_weights[l] - options.step * grad_w).cwiseMax(-box).cwiseMin(box);
      net.hidden_biases[l] = (net.hidden_biases[l] - options.step * grad_b).cwiseMax(-box).cwiseMin(box);
    }
    net.out_weights = (net.out_weights - options.step * step_out).cwiseMax(-box).cwiseMin(box);
    net.out_bias = std::clamp(net.out_bias - options.step * step_bias, -box, box);
  }

  FittedHypothesis fit;
  fit.model = std::move(best);
  fit.cls = cls;
  fit.meta.iterations = iterations;
  fit.meta.empirical_risk = best_risk;
  return fit;
}

FittedHypothesis fit_weighted_erm(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& w, const HypothesisClassSpec& cls,
                                  std::uint64_t seed, NetTrainingOptions options) {
  const Eigen::Index m = w.size();
  if (m > z.rows() || m > y.size()) throw std::domain_error("weights cover more observations than the data");
  const Eigen::MatrixXd zm = z.topRows(m);
  const Eigen::VectorXd ym = y.head(m);
  switch (cls.kind) {
    case HypothesisKind::LinearBall: return fit_linear_ball(zm, ym, w, cls);
    case HypothesisKind::StepBasis:
      if (zm.cols() != 1) throw std::domain_error("step basis needs scalar covariates");
      return fit_step_basis(zm.col(0), ym, w, cls);
    case HypothesisKind::ReluNet: return fit_relu_net(zm, ym, w, cls, seed, options);
  }
  throw std::logic_error("unhandled hypothesis class");
}

FittedHypothesis fit_weighted_erm(const SamplePath& path, const WeightVector& w,
                                  const HypothesisClassSpec& cls, std::uint64_t seed,
                                  NetTrainingOptions options) {
  if (w.size() > path.n()) throw std::domain_error("weights may only cover observations 1..n");
  return fit_weighted_erm(path.z, path.y, w.entries(), cls, seed, options);
}

double TargetFunction::operator()(const Eigen::Ref<const Eigen::RowVectorXd>& z) const {
  return coeffs.dot(feature(map, z));
}

double target_integral(const TargetFunction& g, double a, double b) {
  if (g.coeffs.size() != 1) throw std::domain_error("target_integral needs a scalar target");
  const double k = g.coeffs[0];
  if (g.map == FeatureMap::Identity) return 0.5 * k * (b * b - a * a);
  return k * (sine_integral(b) - sine_integral(a));
}

Eigen::MatrixXd draw_covariates(CovariateLaw law, int p, int count, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::MatrixXd z(count, p);
  const double half = 1.0 / std::sqrt(static_cast<double>(p));
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < p; ++j) {
      const double u = std::min(uniform(rng), std::nextafter(1.0, 0.0));
      switch (law) {
        case CovariateLaw::UniformCube: z(i, j) = (2.0 * u - 1.0) * half; break;
        case CovariateLaw::UnitInterval: z(i, j) = u; break;
        case CovariateLaw::Constant: z(i, j) = 1.0; break;
      }
    }
  }
  return z;
}

DistanceEstimate l2_distance_mc(const Predictor& f, const Predictor& g, CovariateLaw law,
                                int p, McOptions mc) {
  if (mc.draws < 2) throw std::domain_error("Monte Carlo needs at least two draws");
  const Eigen::MatrixXd z = draw_covariates(law, p, mc.draws, mc.seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < mc.draws; ++i) {
    const double d = f(z.row(i)) - g(z.row(i));
    const double x = d * d;
    const double delta = x - mean;
    mean += delta / (i + 1);
    m2 += delta * (x - mean);
  }
  const double var = m2 / (mc.draws - 1);
  return {mean, std::sqrt(var / mc.draws), DistanceMode::MonteCarlo};
}

DistanceEstimate l2_distance(const FittedHypothesis& f, const TargetFunction& g,
                             CovariateLaw law, int p, McOptions mc) {
  if (const auto* lin = std::get_if<LinearModel>(&f.model);
      lin && g.map == FeatureMap::Identity && lin->beta.size() == g.coeffs.size()) {
    const Eigen::VectorXd diff = lin->beta - g.coeffs;
    return {diff.dot(covariate_second_moment(law, p) * diff), 0.0, DistanceMode::Exact};
  }
  if (const auto* step = std::get_if<StepModel>(&f.model);
      step && law == CovariateLaw::UnitInterval && g.coeffs.size() == 1) {
    const auto q = static_cast<int>(step->values.size());
    double total = 0.0;
    for (int j = 0; j < q; ++j)
      total += constant_vs_target_sq(step->values[j], g, double(j) / q, double(j + 1) / q);
    return {std::max(0.0, total), 0.0, DistanceMode::Exact};
  }
  return l2_distance_mc(as_predictor(f), as_predictor(g), law, p, mc);
}

DistanceEstimate l2_distance(const FittedHypothesis& f, const FittedHypothesis& g,
                             CovariateLaw law, int p, McOptions mc) {
  const auto* lf = std::get_if<LinearModel>(&f.model);
  const auto* lg = std::get_if<LinearModel>(&g.model);
  if (lf && lg) return l2_distance(f, TargetFunction{FeatureMap::Identity, lg->beta}, law, p, mc);
  const auto* sf = std::get_if<StepModel>(&f.model);
  const auto* sg = std::get_if<StepModel>(&g.model);
  if (sf && sg && law == CovariateLaw::UnitInterval) {
    const auto edges = merged_edges(static_cast<int>(sf->values.size()),
                                    static_cast<int>(sg->values.size()));
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double mid = 0.5 * (edges[i] + edges[i + 1]);
      const double d = sf->values[sf->bin_of(mid)] - sg->values[sg->bin_of(mid)];
      total += d * d * (edges[i + 1] - edges[i]);
    }
    return {total, 0.0, DistanceMode::Exact};
  }
  return l2_distance_mc(as_predictor(f), as_predictor(g), law, p, mc);
}

DistanceEstimate sup_distance(const FittedHypothesis& f, const TargetFunction& g,
                              CovariateLaw law, int p) {
  if (const auto* lin = std::get_if<LinearModel>(&f.model);
      lin && g.map == FeatureMap::Identity && lin->beta.size() == g.coeffs.size()) {
    return {(lin->beta - g.coeffs).norm(), 0.0, DistanceMode::Exact};
  }
  if (const auto* step = std::get_if<StepModel>(&f.model);
      step && law == CovariateLaw::UnitInterval && g.coeffs.size() == 1) {
    const auto q = static_cast<int>(step->values.size());
    double best = 0.0;
    for (int j = 0; j < q; ++j) {
      const auto [lo, hi] = target_range(g, double(j) / q, double(j + 1) / q);
      const double c = step->values[j];
      best = std::max({best, std::abs(c - lo), std::abs(c - hi)});
    }
    return {best, 0.0, DistanceMode::Exact};
  }
  return sup_on_grid(as_predictor(f), as_predictor(g), law, p);
}

DistanceEstimate sup_distance(const FittedHypothesis& f, const FittedHypothesis& g,
                              CovariateLaw law, int p) {
  const auto* lf = std::get_if<LinearModel>(&f.model);
  const auto* lg = std::get_if<LinearModel>(&g.model);
  if (lf && lg) return {(lf->beta - lg->beta).norm(), 0.0, DistanceMode::Exact};
  const auto* sf = std::get_if<StepModel>(&f.model);
  const auto* sg = std::get_if<StepModel>(&g.model);
  if (sf && sg) {
    const auto edges = merged_edges(static_cast<int>(sf->values.size()),
                                    static_cast<int>(sg->values.size()));
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double mid = 0.5 * (edges[i] + edges[i + 1]);
      best = std::max(best, std::abs(sf->values[sf->bin_of(mid)] - sg->values[sg->bin_of(mid)]));
    }
    return {best, 0.0, DistanceMode::Exact};
  }
  return sup_on_grid(as_predictor(f), as_predictor(g), law, p);
}

}  // namespace drifterm
