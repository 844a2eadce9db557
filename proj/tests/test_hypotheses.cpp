#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "drifterm/hypotheses.hpp"
#include "drifterm/random.hpp"

using namespace drifterm;

namespace {

ProcessSpec linear_spec(int n, double sd) {
  ProcessSpec spec;
  spec.n = n;
  spec.p = 2;
  spec.bound = 2.0;
  spec.drift.start = Eigen::Vector2d(0.5, -0.5);
  spec.noise_sd = sd;
  return spec;
}

double weighted_risk_linear(double beta, const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w) {
  return (w.array() * (y - beta * z).array().square()).sum();
}

FittedHypothesis step_model(const Eigen::VectorXd& values, double bound) {
  FittedHypothesis h;
  h.cls = step_basis_class(bound, int(values.size()));
  h.model = StepModel{values};
  return h;
}

FittedHypothesis linear_model(const Eigen::VectorXd& beta, double bound) {
  FittedHypothesis h;
  h.cls = linear_ball_class(bound, covariate_second_moment(CovariateLaw::UniformCube, int(beta.size())));
  h.model = LinearModel{beta};
  return h;
}

}  // namespace

TEST_CASE("basis size rule") {
  CHECK(basis_size(1.0 / std::sqrt(1000.0)) == 10);
  CHECK(basis_size(1.0) == 1);
  CHECK(basis_size(1.0 / 8.0) == 4);
  CHECK_THROWS_AS(basis_size(0.0), std::domain_error);
  CHECK_THROWS_AS(basis_size(1.5), std::domain_error);
}

TEST_CASE("class constructors carry C_inf") {
  const auto sigma = covariate_second_moment(CovariateLaw::UniformCube, 2);
  CHECK(linear_ball_class(1.0, sigma).c_inf == doctest::Approx(std::sqrt(1.0 / 6.0)));
  CHECK(step_basis_class(1.0, 9).c_inf == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("noiseless stationary linear path is recovered") {
  const auto spec = linear_spec(200, 0.0);
  const auto path = simulate(spec, 4);
  const auto cls = linear_ball_class(2.0, covariate_second_moment(spec.law, spec.p));
  const auto fit = fit_weighted_erm(path, uniform_weights(200), cls);
  const auto& beta = std::get<LinearModel>(fit.model).beta;
  CHECK((beta - spec.drift.start).norm() <= 1e-8);
  CHECK_FALSE(fit.meta.constrained);
}

TEST_CASE("interior linear fits satisfy the weighted normal equations") {
  const auto spec = linear_spec(300, 0.3);
  const auto path = simulate(spec, 12);
  const auto cls = linear_ball_class(2.0, covariate_second_moment(spec.law, spec.p));
  for (double theta : {0.01, 0.1}) {
    const auto w = make_weights({WeightFamily::ExponentialSmoothing, 300, 300, theta});
    const auto fit = fit_weighted_erm(path, w, cls);
    REQUIRE_FALSE(fit.meta.constrained);
    const auto& beta = std::get<LinearModel>(fit.model).beta;
    const Eigen::MatrixXd z = path.z.topRows(300);
    const Eigen::VectorXd resid = path.y.head(300) - z * beta;
    const Eigen::VectorXd grad = z.transpose() * (w.entries().array() * resid.array()).matrix();
    CHECK(grad.norm() <= 1e-8);
  }
}

TEST_CASE("norm-constrained linear fit lands on the boundary") {
  const auto spec = linear_spec(400, 0.3);
  const auto path = simulate(spec, 21);
  const auto cls = linear_ball_class(0.2, covariate_second_moment(spec.law, spec.p));
  const auto fit = fit_weighted_erm(path, uniform_weights(400), cls);
  CHECK(fit.meta.constrained);
  CHECK(std::get<LinearModel>(fit.model).beta.norm() == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(fit.meta.multiplier > 0.0);
}

TEST_CASE("single-support weight gives the clipped observation") {
  Eigen::VectorXd z(3), y(3);
  z << 0.3, 0.6, 0.9;
  y << 2.0, 0.1, -0.4;
  const Eigen::VectorXd w = Eigen::Vector3d(1.0, 0.0, 0.0);
  auto fit = fit_weighted_erm(Eigen::MatrixXd(z), y, w, step_basis_class(1.5, 1));
  CHECK(std::get<StepModel>(fit.model).values[0] == 1.5);
  y[0] = 0.7;
  fit = fit_weighted_erm(Eigen::MatrixXd(z), y, w, step_basis_class(1.5, 1));
  CHECK(std::get<StepModel>(fit.model).values[0] == doctest::Approx(0.7));
}

TEST_CASE("linear and step ERM match exhaustive search on small instances") {
  Rng rng = make_rng(314);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double step = 1e-4;
  for (int inst = 0; inst < 20; ++inst) {
    const int n = 2 + inst % 7;
    const double bound = 0.3 + unit(rng);
    Eigen::VectorXd z(n), y(n), w(n);
    for (int i = 0; i < n; ++i) {
      z[i] = unit(rng) * 0.999;
      y[i] = 2.0 * unit(rng) - 1.0;
      w[i] = unit(rng) + 0.05;
    }
    w /= w.sum();

    // Linear ball in one dimension: covariates on [-1, 1].
    Eigen::VectorXd zc = 2.0 * z.array() - 1.0;
    const auto lin = fit_weighted_erm(Eigen::MatrixXd(zc), y, w,
                                      linear_ball_class(bound, Eigen::MatrixXd::Identity(1, 1) / 3.0));
    double best = 0.0, best_risk = 1e300;
    const int steps = int(std::floor(2.0 * bound / step));
    for (int k = 0; k <= steps; ++k) {
      const double b = -bound + k * step;
      const double r = weighted_risk_linear(b, zc, y, w);
      if (r < best_risk) best_risk = r, best = b;
    }
    CHECK(std::abs(std::get<LinearModel>(lin.model).beta[0] - best) <= 2e-4);

    // Step basis: the risk separates over bins, so each bin is searched on its own grid.
    const int q = 1 + inst % 3;
    const auto st = fit_weighted_erm(Eigen::MatrixXd(z), y, w, step_basis_class(bound, q));
    const auto& values = std::get<StepModel>(st.model).values;
    for (int j = 0; j < q; ++j) {
      double vbest = 0.0, vrisk = 1e300;
      bool any = false;
      for (int k = 0; k <= steps; ++k) {
        const double v = -bound + k * step;
        double r = 0.0;
        for (int i = 0; i < n; ++i) {
          if (int(z[i] * q) != j) continue;
          any = true;
          r += w[i] * (y[i] - v) * (y[i] - v);
        }
        if (r < vrisk) vrisk = r, vbest = v;
      }
      if (any) CHECK(std::abs(values[j] - vbest) <= 2e-4);
    }
  }
}

TEST_CASE("signed weights with no positive curvature are rejected") {
  Eigen::MatrixXd z(2, 1);
  z << 0.5, 0.5;
  const Eigen::VectorXd y = Eigen::Vector2d(0.1, 0.2);
  const Eigen::VectorXd w = Eigen::Vector2d(-0.5, 0.5);
  CHECK_THROWS_AS(fit_linear_ball(z, y, w, linear_ball_class(1.0, Eigen::MatrixXd::Identity(1, 1))),
                  RankDeficientError);
}

TEST_CASE("linear class satisfies the C_inf inequality") {
  const int p = 3;
  const auto sigma = covariate_second_moment(CovariateLaw::UniformCube, p);
  const double c_inf = std::sqrt(sigma.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff());
  Rng rng = make_rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd a(p), b(p);
    for (int j = 0; j < p; ++j) a[j] = normal(rng), b[j] = normal(rng);
    const auto f = linear_model(a, 10.0);
    const double l2 = std::sqrt(l2_distance(f, TargetFunction{FeatureMap::Identity, b}, CovariateLaw::UniformCube, p).value);
    const double sup = sup_distance(f, TargetFunction{FeatureMap::Identity, b}, CovariateLaw::UniformCube, p).value;
    CHECK(sup == doctest::Approx((a - b).norm()));
    CHECK(l2 >= c_inf * sup - 1e-9);
  }
}

TEST_CASE("step basis functions are orthogonal with norm 1/q") {
  const int q = 5;
  const int draws = 200000;
  const Eigen::MatrixXd z = draw_covariates(CovariateLaw::UnitInterval, 1, draws, 55);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < draws; ++i) {
    const int j = std::min(q - 1, int(z(i, 0) * q));
    sum(j, j) += 1.0;
  }
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      const double expected = a == b ? 1.0 / q : 0.0;
      const double mean = sum(a, b) / draws;
      const double se = std::sqrt(1.0 / q * (1.0 - 1.0 / q) / draws);
      CHECK(std::abs(mean - expected) <= 4.0 * se + 1e-15);
    }
  }
}

TEST_CASE("exact step distances agree with Monte Carlo") {
  const Eigen::VectorXd a = Eigen::Vector3d(0.4, -0.2, 1.0);
  const Eigen::VectorXd b = Eigen::Vector2d(-0.3, 0.6);
  const auto f = step_model(a, 1.5);
  const auto g = step_model(b, 1.5);
  // Bins of thirds against halves: overlaps of length 1/3, 1/6, 1/6, 1/3.
  const double closed = (0.7 * 0.7) / 3.0 + (0.1 * 0.1) / 6.0 + (0.8 * 0.8) / 6.0 + (0.4 * 0.4) / 3.0;
  const auto exact = l2_distance(f, g, CovariateLaw::UnitInterval, 1);
  CHECK(exact.mode == DistanceMode::Exact);
  CHECK(exact.value == doctest::Approx(closed).epsilon(1e-12));

  auto pf = [&](const Eigen::Ref<const Eigen::RowVectorXd>& z) { return f.predict(z); };
  auto pg = [&](const Eigen::Ref<const Eigen::RowVectorXd>& z) { return g.predict(z); };
  const auto mc = l2_distance_mc(pf, pg, CovariateLaw::UnitInterval, 1, {200000, 3});
  CHECK(std::abs(mc.value - closed) <= 4.0 * mc.std_error);

  const TargetFunction sine{FeatureMap::LipschitzSine, Eigen::VectorXd::Constant(1, 1.0)};
  const auto ex = l2_distance(f, sine, CovariateLaw::UnitInterval, 1);
  auto ps = [&](const Eigen::Ref<const Eigen::RowVectorXd>& z) { return sine(z); };
  const auto mc2 = l2_distance_mc(pf, ps, CovariateLaw::UnitInterval, 1, {200000, 4});
  CHECK(ex.mode == DistanceMode::Exact);
  CHECK(std::abs(mc2.value - ex.value) <= 4.0 * mc2.std_error);
}

TEST_CASE("step approximation of a 1-Lipschitz target is within 1/q") {
  const TargetFunction sine{FeatureMap::LipschitzSine, Eigen::VectorXd::Constant(1, 1.0)};
  for (int q : {1, 2, 5, 10, 33}) {
    Eigen::VectorXd values(q);
    for (int j = 0; j < q; ++j) values[j] = sine(Eigen::RowVectorXd::Constant(1, (j + 0.5) / q));
    const auto h = step_model(values, 1.0);
    const auto d = sup_distance(h, sine, CovariateLaw::UnitInterval, 1);
    CHECK(d.value <= 1.0 / q + 1e-12);
  }
}

TEST_CASE("distance of a hypothesis to itself is zero") {
  const auto f = linear_model(Eigen::Vector2d(0.3, 0.1), 1.0);
  CHECK(l2_distance(f, f, CovariateLaw::UniformCube, 2).value == 0.0);
  CHECK(sup_distance(f, f, CovariateLaw::UniformCube, 2).value == 0.0);
  const auto s = step_model(Eigen::Vector3d(0.1, 0.2, 0.3), 1.0);
  CHECK(l2_distance(s, s, CovariateLaw::UnitInterval, 1).value == 0.0);
  CHECK(sup_distance(s, s, CovariateLaw::UnitInterval, 1).value == 0.0);
}

TEST_CASE("ReLU network fits linear data about as well as the linear class") {
  ProcessSpec spec;
  spec.n = 200;
  spec.p = 1;
  spec.bound = 1.0;
  spec.law = CovariateLaw::UniformCube;
  spec.drift.start = Eigen::VectorXd::Constant(1, 0.5);
  spec.noise_sd = 0.05;
  const auto path = simulate(spec, 6);
  const auto w = uniform_weights(200);
  const Eigen::MatrixXd z = path.z.topRows(200);
  const Eigen::VectorXd y = path.y.head(200);
  const auto lin = fit_weighted_erm(path, w, linear_ball_class(1.0, covariate_second_moment(spec.law, 1)));
  const auto net = fit_weighted_erm(path, w, relu_net_class(1.0, 1, 8, 1, 1.0), 7);
  const double lin_risk = weighted_empirical_risk(lin, z, y, w.entries());
  const double net_risk = weighted_empirical_risk(net, z, y, w.entries());
  CHECK(net_risk <= lin_risk + 1e-3);
  CHECK(std::get<ReluNetwork>(net.model).max_abs_parameter() <= 1.0);
}
