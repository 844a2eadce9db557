// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "drifterm/harness.hpp"
#include "drifterm/mixing.hpp"
#include "drifterm/random.hpp"
#include "drifterm/rates.hpp"
#include "drifterm/risk.hpp"
#include "drifterm/weights.hpp"

using namespace drifterm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig config(const char* name) {
  return experiment_config_from_json(read_json_file(std::string(DRIFTERM_CONFIG_DIR) + "/" + name));
}

Outcome slope_criterion(const ExperimentConfig& cfg, double lo, double hi, double min_r2, double budget_s) {
  const auto start = Clock::now();
  const auto result = run_experiment(cfg);
  const double elapsed = seconds_since(start);
  if (!result.slope) return {false, "no slope"};
  const auto& s = *result.slope;
  const bool pass = s.slope >= lo && s.slope <= hi && s.r2 >= min_r2 && result.failed_rows == 0 &&
                    (budget_s <= 0.0 || elapsed < budget_s);
  return {pass, fmt("slope=%.4f band=[%.2f,%.2f] r2=%.4f (min %.2f) rows=%zu failed=%d %.1fs", s.slope, lo, hi,
                    s.r2, min_r2, result.rows.size(), result.failed_rows, elapsed)};
}

Outcome criterion1() {
  return slope_criterion(config("linear_iid.json"), -1.15, -0.85, 0.98, 120.0);
}

Outcome criterion2() {
  return slope_criterion(config("step_sine.json"), -0.77, -0.57, 0.97, 240.0);
}

Outcome criterion3() {
  return slope_criterion(config("exp_neff.json"), -1.15, -0.85, 0.0, 0.0);
}

Outcome criterion4() {
  const auto slope = slope_criterion(config("linear_ar1.json"), -1.15, -0.85, 0.0, 0.0);

  const int n = 10000;
  const double delta = 0.05;
  const auto constants = class_constants(WeightFamily::UniformWindow, {1.0, double(n)}, {n, n});
  const auto mixing = beta_only_profile([](int m) { return m == 0 ? 1.0 : std::pow(double(m), -5.0); });
  const auto cls = linear_ball_class(1.0, covariate_second_moment(CovariateLaw::UniformCube, 2));
  const auto params = make_rate_parameters(
      constants, weight_cover_log(WeightFamily::UniformWindow, CoverSelector::SingleT, n), mixing, cls, n, delta);
  const auto grid = condition_grid(params.cw, params.c1);
  const auto one = find_rate_constant(RateVariant::PropFiveI, params, zero_approx_error(), grid);
  const auto two = find_rate_constant(RateVariant::PropFiveII, params, zero_approx_error(), grid);
  const double u = 1.0 / std::sqrt(double(n));
  const double cert_i = bound_certificate(one.rate, u, delta, 0.0);
  const double cert_ii = bound_certificate(two.rate, u, delta, 0.0);
  return {slope.pass && cert_ii < cert_i,
          slope.detail + fmt("; m_beta=%d cert_ii=%.5g < cert_i=%.5g", params.m_beta, cert_ii, cert_i)};
}

Outcome criterion5() {
  ProcessSpec spec;
  spec.kind = ProcessKind::DriftingVariance;
  spec.n = 2000;
  spec.p = 1;
  spec.bound = 20.0;
  spec.law = CovariateLaw::Constant;
  spec.drift.start = Eigen::VectorXd::Constant(1, 1.0);
  spec.noise_sd = 1.0;
  spec.noise_var_end = 11.0;
  const auto cls = linear_ball_class(spec.bound, covariate_second_moment(spec.law, 1));
  const auto w = uniform_weights(spec.n);
  const auto fit = fit_weighted_erm(simulate(spec, 20240605), w, cls);
  const auto report = risk_report(fit, spec, w, true);
  const double dis = report.discrepancy_sum.value_or(-1.0);
  const double bound = 2.0 * (report.learning_error.value + report.drift_error.value);
  const double factor = dis / bound;
  const bool pass = report.drift_error.value == 0.0 && std::abs(dis - 10.0) <= 1e-9 && factor >= 100.0;
  return {pass, fmt("drift=%g discrepancy_sum=%.12f bound=%.4g factor=%.1f", report.drift_error.value, dis,
                    bound, factor)};
}

// Nearest net member in L1; tries the members bracketing the parameter first.
double nearest_net_distance(const std::vector<WeightSpec>& net, const std::vector<WeightVector>& members,
                            const WeightVector& w, double eps) {
  const double param = w.spec().param;
  auto it = std::lower_bound(net.begin(), net.end(), param,
                             [](const WeightSpec& s, double v) { return s.param < v; });
  double best = 1e300;
  const auto k = std::size_t(it - net.begin());
  for (std::size_t j : {k == 0 ? 0 : k - 1, std::min(k, net.size() - 1)})
    best = std::min(best, (members[j].entries() - w.entries()).lpNorm<1>());
  if (best <= eps) return best;
  for (const auto& m : members) best = std::min(best, (m.entries() - w.entries()).lpNorm<1>());
  return best;
}

Outcome criterion6() {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;

  const auto uni = class_constants(WeightFamily::UniformWindow, {1.0, 200.0}, {1, 200});
  pass = pass && uni.bw == 1.0 && uni.c1 == 1.0 && uni.exact;
  detail += fmt("uniform bw=%g c1=%g", uni.bw, uni.c1);

  double worst_ratio = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double theta = std::exp(std::log(1e-4) + (std::log(10.0) - std::log(1e-4)) * i / 200.0);
    const double rho = std::exp(-theta);
    for (int t = 1; t <= 200; ++t) {
      const auto w = make_weights({WeightFamily::ExponentialSmoothing, t, t, theta});
      worst_ratio = std::max(worst_ratio, std::abs(w.linf() / w.l2sq() - (1.0 + rho) / (1.0 + std::pow(rho, t))));
    }
  }
  pass = pass && worst_ratio <= 1e-10;
  detail += fmt("; ratio err=%.2e", worst_ratio);

  const auto ex = class_constants(WeightFamily::ExponentialSmoothing, {0.0, kDefaultExpUpper}, {1, 200});
  const auto br = class_constants(WeightFamily::BrownDES, {0.0, 1.0}, {1, 200});
  pass = pass && ex.bw <= 2.0 && br.bw <= 18.0 * std::exp(2.0) && br.c1 <= 3.0 && ex.grid_points >= 10000 &&
         br.grid_points >= 10000;
  detail += fmt("; exp bw=%.4f brown bw=%.3f c1=%.4f", ex.bw, br.bw, br.c1);

  struct NetCase {
    WeightFamily family;
    Interval range;
    int t;
    double eps;
  };
  Rng rng = make_rng(606);
  int violations = 0;
  for (const NetCase& c : {NetCase{WeightFamily::UniformWindow, {1.0, 50.0}, 50, 0.01},
                           NetCase{WeightFamily::ExponentialSmoothing, {0.0, kDefaultExpUpper}, 50, 0.05},
                           NetCase{WeightFamily::BrownDES, {0.0, 1.0}, 30, 0.1}}) {
    auto net = build_weight_net(c.family, c.range, c.t, c.t, c.eps);
    std::sort(net.begin(), net.end(), [](const WeightSpec& a, const WeightSpec& b) { return a.param < b.param; });
    std::vector<WeightVector> members;
    for (const auto& s : net) members.push_back(make_weights(s));
    std::uniform_real_distribution<double> draw(c.range.lo, c.range.hi);
    for (int i = 0; i < 1000; ++i) {
      double param = draw(rng);
      if (c.family == WeightFamily::UniformWindow) param = std::ceil(param);
      if (param <= 0.0) param = c.range.hi * 1e-9;
      const auto w = make_weights({c.family, c.t, c.t, param});
      if (nearest_net_distance(net, members, w, c.eps) > c.eps) ++violations;
    }
  }
  const double elapsed = seconds_since(start);
  pass = pass && violations == 0 && elapsed < 30.0;
  detail += fmt("; net violations=%d %.1fs", violations, elapsed);
  return {pass, detail};
}

Outcome criterion7() {
  const auto start = Clock::now();
  const int n = 1000;
  const int reps = 10000;
  const double delta = 0.05;
  const double b = 1.0;
  // Var of clamp(X, -1, 1) for X ~ N(0, 1): 1 - 2 phi(1).
  const double v = 1.0 - 2.0 * std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi);
  const auto w = uniform_weights(n);
  bool pass = true;
  std::string detail = fmt("v=%.6f", v);
  for (double phi : {0.3, 0.6}) {
    const auto profile = ar1_profile(phi);
    const int m = m_beta(profile, n, delta).m;
    const double kr = *profile.k_rho();
    Rng rng = make_rng(derive_seed(7000, {std::uint64_t(phi * 10)}));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innovation = std::sqrt(1.0 - phi * phi);
    const std::vector<double> levels{0.05, 0.1, 0.2};
    std::vector<int> exceed(levels.size(), 0);
    for (int r = 0; r < reps; ++r) {
      double x = normal(rng);
      double sum = 0.0;
      for (int t = 0; t < n; ++t) {
        if (t > 0) x = phi * x + innovation * normal(rng);
        sum += w[t] * std::clamp(x, -1.0, 1.0);
      }
      for (std::size_t k = 0; k < levels.size(); ++k)
        if (std::abs(sum) > levels[k]) ++exceed[k];
    }
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const double freq = double(exceed[k]) / reps;
      const double se = std::sqrt(std::max(freq * (1.0 - freq), 1.0 / reps) / reps);
      const double bound = blocked_bernstein_tail(v, b, m, w, kr, levels[k]);
      pass = pass && freq <= bound + 3.0 * se;
      detail += fmt("; phi=%.1f m=%d s=%.2f freq=%.4f bound=%.4f", phi, m, levels[k], freq, bound);
    }
  }
  const double elapsed = seconds_since(start);
  pass = pass && elapsed < 60.0;
  detail += fmt("; %.1fs", elapsed);
  return {pass, detail};
}

double grid_argmin(double lo, double hi, double step, const std::function<double(double)>& risk) {
  double best = lo, best_risk = 1e300;
  const int count = int(std::floor((hi - lo) / step + 1e-9));
  for (int k = 0; k <= count; ++k) {
    const double v = lo + k * step;
    const double r = risk(v);
    if (r < best_risk) best_risk = r, best = v;
  }
  return best;
}

Outcome criterion8() {
  Rng rng = make_rng(808);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double step = 1e-4;
  double worst = 0.0;
  int instances = 0;
  for (int n = 1; n <= 8; ++n) {
    for (int rep = 0; rep < 12; ++rep) {
      const double bound = 0.1 + 1.4 * unit(rng);
      Eigen::VectorXd z(n), y(n), w(n);
      for (int i = 0; i < n; ++i) {
        z[i] = unit(rng) * 0.9999;
        y[i] = 3.0 * unit(rng) - 1.5;
        w[i] = unit(rng) + 0.01;
      }
      w /= w.sum();
      const Eigen::VectorXd zc = 2.0 * z.array() - 1.0;
      const auto lin = fit_weighted_erm(Eigen::MatrixXd(zc), y, w,
                                        linear_ball_class(bound, Eigen::MatrixXd::Identity(1, 1) / 3.0));
      const double b_grid = grid_argmin(-bound, bound, step, [&](double b) {
        return (w.array() * (y - b * zc).array().square()).sum();
      });
      worst = std::max(worst, std::abs(std::get<LinearModel>(lin.model).beta[0] - b_grid));
      ++instances;

      for (int q = 1; q <= 3; ++q) {
        const auto st = fit_weighted_erm(Eigen::MatrixXd(z), y, w, step_basis_class(bound, q));
        const auto& values = std::get<StepModel>(st.model).values;
        for (int j = 0; j < q; ++j) {
          bool occupied = false;
          for (int i = 0; i < n; ++i) occupied = occupied || int(z[i] * q) == j;
          if (!occupied) continue;
          const double v_grid = grid_argmin(-bound, bound, step, [&](double v) {
            double r = 0.0;
            for (int i = 0; i < n; ++i)
              if (int(z[i] * q) == j) r += w[i] * (y[i] - v) * (y[i] - v);
            return r;
          });
          worst = std::max(worst, std::abs(values[j] - v_grid));
        }
        ++instances;
      }
    }
  }

  int holds = 0;
  const int runs = 1000;
  for (int run = 0; run < runs; ++run) {
    const std::uint64_t seed = derive_seed(8080, {std::uint64_t(run)});
    Rng r = make_rng(seed);
    ProcessSpec spec;
    spec.n = 20 + int(unit(r) * 200);
    const bool step_class = run % 2 == 1;
    if (step_class) {
      spec.p = 1;
      spec.bound = 1.5;
      spec.law = CovariateLaw::UnitInterval;
      spec.feature = FeatureMap::LipschitzSine;
      spec.drift.shape = DriftPath::Shape::Linear;
      spec.drift.start = Eigen::VectorXd::Constant(1, 2.0 * unit(r) - 1.0);
      spec.drift.end = Eigen::VectorXd::Constant(1, 2.0 * unit(r) - 1.0);
    } else {
      spec.p = 2;
      spec.bound = 2.0;
      spec.drift.shape = run % 4 == 0 ? DriftPath::Shape::Switch : DriftPath::Shape::Linear;
      spec.drift.start = Eigen::Vector2d(unit(r) - 0.5, unit(r) - 0.5);
      spec.drift.end = Eigen::Vector2d(unit(r) - 0.5, unit(r) - 0.5);
    }
    spec.noise_sd = 0.2 * unit(r);
    const double theta = 0.005 + unit(r);
    const auto w = make_weights({WeightFamily::ExponentialSmoothing, spec.n, spec.n, theta});
    const auto cls = step_class ? step_basis_class(1.5, basis_size(w.l2()))
                                : linear_ball_class(0.2 + unit(r), covariate_second_moment(spec.law, 2));
    const auto fit = fit_weighted_erm(simulate(spec, seed), w, cls);
    const auto report = risk_report(fit, spec, w);
    if (report.excess_risk.value <= 2.0 * (report.learning_error.value + report.drift_error.value)) ++holds;
  }
  const bool pass = worst <= 2e-4 && holds == runs;
  return {pass, fmt("instances=%d max param gap=%.2e; decomposition %d/%d", instances, worst, holds, runs)};
}

Outcome criterion9() {
  const auto baseline_cfg = config("linear_iid.json");
  const auto baseline = run_experiment(baseline_cfg);
  const double c_cal = calibrate_ccal(baseline.rows);

  // Fresh seeds of the baseline config.
  auto fresh_cfg = baseline_cfg;
  fresh_cfg.base_seed = derive_seed(baseline_cfg.base_seed, {9});
  const auto fresh = run_experiment(fresh_cfg);
  int dominated = 0;
  for (const auto& row : fresh.rows)
    if (row.excess_risk <= c_cal * row.certificate) ++dominated;
  const double dominance = double(dominated) / double(fresh.rows.size());

  // The same 200 paths against a 50-point exponential grid.
  const int n = 1024;
  const int paths = 200;
  auto probe_cfg = baseline_cfg;
  probe_cfg.weights = WeightGrid{};
  probe_cfg.weights.family = WeightFamily::ExponentialSmoothing;
  std::vector<double> thetas;
  for (int i = 0; i < 50; ++i) thetas.push_back(std::exp(std::log(1e-3) + (std::log(0.5) - std::log(1e-3)) * i / 49.0));
  probe_cfg.weights.params = thetas;
  const ProcessSpec spec = baseline_cfg.process.with_n(n);

  std::vector<RateFunction> rates;
  std::vector<WeightVector> members;
  for (double theta : thetas) {
    const WeightSpec member{WeightFamily::ExponentialSmoothing, n, n, theta};
    rates.push_back(rate_for_cell(probe_cfg, n, member).rate);
    members.push_back(make_weights(member));
  }
  int violations = 0;
  for (int path_index = 0; path_index < paths; ++path_index) {
    const auto path = simulate(spec, derive_seed(baseline_cfg.base_seed, {99, std::uint64_t(path_index)}));
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      const auto& w = members[k];
      const auto fit = fit_weighted_erm(path, w, probe_cfg.cls.for_weights(spec, w.l2()));
      const double excess = excess_risk(fit, spec, n).value;
      const double cert = bound_certificate(rates[k], w.l2(), probe_cfg.delta, drift_error(spec, w, n));
      if (excess > c_cal * cert) ++violations;
    }
  }
  const double rate = double(violations) / double(paths * thetas.size());
  const bool pass = rate <= 0.02 && dominance >= 0.98;
  return {pass, fmt("C_cal=%.4g violations=%d/%d (%.2f%%); fresh-seed dominance=%.4f", c_cal, violations,
                    paths * int(thetas.size()), 100.0 * rate, dominance)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 linear-class rate", criterion1},
      {"2 basis-class rate", criterion2},
      {"3 effective sample size scaling", criterion3},
      {"4 dependence robustness", criterion4},
      {"5 mean-stationary variance drift", criterion5},
      {"6 weight class constants", criterion6},
      {"7 blocked Bernstein tail", criterion7},
      {"8 brute-force ERM and decomposition", criterion8},
      {"9 weight-uniform certificate", criterion9},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion %s: %s\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
