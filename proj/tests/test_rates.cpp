#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "drifterm/rates.hpp"

using namespace drifterm;

namespace {

RateParameters singleton_params() {
  RateParameters p;
  p.cw = 1e-3;
  p.log_n1_w = [](double) { return 0.0; };
  p.log_ninf_h = singleton_cover_log();
  return p;
}

// Uniform windows at t = n with the linear ball, mixing beta(m) = m^-5.
RateParameters polynomial_mixing_params(int n, double delta) {
  const auto constants = class_constants(WeightFamily::UniformWindow, {1.0, double(n)}, {n, n});
  const auto mixing = beta_only_profile([](int m) { return m == 0 ? 1.0 : std::pow(double(m), -5.0); });
  const auto cls = linear_ball_class(1.0, covariate_second_moment(CovariateLaw::UniformCube, 2));
  return make_rate_parameters(constants, weight_cover_log(WeightFamily::UniformWindow, CoverSelector::SingleT, n),
                              mixing, cls, n, delta);
}

}  // namespace

TEST_CASE("K_w of singleton classes is 4") {
  const auto p = singleton_params();
  for (double u : {0.01, 0.3, 1.0}) CHECK(kw(p, u) == 4.0);
}

TEST_CASE("K_w for uniform windows over all t and the linear ball") {
  const int n = 1000;
  RateParameters p;
  p.cw = 1.0 / std::sqrt(double(n));
  p.n = n;
  p.log_n1_w = weight_cover_log(WeightFamily::UniformWindow, CoverSelector::UnionOverT, n);
  p.log_ninf_h = linear_cover_log(2, 1.0);
  const double u = 1.0 / std::sqrt(double(n));
  const double eps_w = u * u / 32.0;
  const double oracle = 4.0 + std::log(n * double(n) / 2.0) + 2.0 * 2.0 * std::log(3.0 / eps_w);
  CHECK(kw(p, u) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(kw(p, u) == doctest::Approx(63.01077725920422).epsilon(1e-13));
}

TEST_CASE("a two-member weight class adds log 2") {
  auto p = singleton_params();
  p.log_n1_w = [](double) { return std::log(2.0); };
  CHECK(kw(p, 0.5) == doctest::Approx(4.0 + std::log(2.0)));
}

TEST_CASE("covering functions are non-increasing in epsilon") {
  const auto w = weight_cover_log(WeightFamily::ExponentialSmoothing, CoverSelector::UnionOverT, 500);
  const auto b = weight_cover_log(WeightFamily::BrownDES, CoverSelector::SingleT, 500);
  const auto h = linear_cover_log(3, 2.0);
  const auto s = step_cover_log(1.0);
  double pw = 1e300, pb = 1e300, ph = 1e300, ps = 1e300;
  for (double eps = 1e-8; eps < 10.0; eps *= 1.5) {
    CHECK(w(eps) <= pw);
    CHECK(b(eps) <= pb);
    CHECK(h(eps, 0.1) <= ph);
    CHECK(s(eps, 0.1) <= ps);
    pw = w(eps), pb = b(eps), ph = h(eps, 0.1), ps = s(eps, 0.1);
  }
  // Larger K shrinks eps_W and can only raise K_w.
  RateParameters p;
  p.cw = 0.05;
  p.n = 400;
  p.log_n1_w = w;
  p.log_ninf_h = h;
  double prev = 0.0;
  for (double k = 1.0; k < 1e9; k *= 10.0) {
    p.K = k;
    CHECK(kw(p, 0.2) >= prev);
    prev = kw(p, 0.2);
  }
}

TEST_CASE("variant (i) reduces to r(u) = u when every constant is 1") {
  auto p = singleton_params();
  p.bw = 0.0;
  p.n = std::numbers::e;
  REQUIRE(p.c_beta_rho() == 1.0);
  const auto r = rate_prop5(RateVariant::PropFiveI, p);
  for (double u : {0.1, 0.5, 1.0}) CHECK(r(u) == doctest::Approx(u).epsilon(1e-15));
}

TEST_CASE("unweighted stationary rate squared is A C log n / n") {
  auto p = singleton_params();
  p.n = 4096;
  p.A = 4.0;
  p.m_beta = 2;
  p.bw = 1.5;
  p.k_rho = 2.0;
  const auto r = rate_prop5(RateVariant::PropFiveI, p);
  const double u = 1.0 / std::sqrt(p.n);
  const double expected = p.A * (2.0 + 3.0) * std::log(p.n) / p.n;
  CHECK(r(u) * r(u) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("variant (ii) needs a positive C_inf") {
  auto p = singleton_params();
  p.n = 1000;
  p.c_inf = 0.0;
  CHECK_THROWS_AS(rate_prop5(RateVariant::PropFiveII, p), RatePreconditionError);
  p.c_inf = 1e-9;
  CHECK_THROWS_AS(rate_prop5(RateVariant::PropFiveII, p), RatePreconditionError);
  p.c_inf = 0.5;
  CHECK_NOTHROW(rate_prop5(RateVariant::PropFiveII, p));
  p.m_beta = 2000;
  CHECK_THROWS_AS(rate_prop5(RateVariant::PropFiveI, p), RatePreconditionError);
}

TEST_CASE("a zero rate fails every grid point") {
  auto p = singleton_params();
  p.n = 100;
  const auto grid = condition_grid(0.1, 1.0, 16);
  const auto report = check_rate_conditions(custom_rate(p, [](double) { return 0.0; }), p,
                                            zero_approx_error(), grid);
  CHECK_FALSE(report.pass);
  for (const auto& pt : report.points) CHECK_FALSE(pt.pass_variance);
}

TEST_CASE("condition grid endpoints") {
  const auto g = condition_grid(0.01, 1.0);
  CHECK(g.size() == kConditionGridPoints + 2);
  CHECK(g.front() == 0.01);
  CHECK(g.back() == 1.0);
  CHECK(condition_grid(0.5, 0.5).size() == 1);
}

TEST_CASE("searched variant (i) rate passes condition (2) on the grid") {
  const auto p = polynomial_mixing_params(10000, 0.05);
  const auto grid = condition_grid(p.cw, p.c1);
  const auto found = find_rate_constant(RateVariant::PropFiveI, p, zero_approx_error(), grid);
  CHECK(found.report.pass);
  CHECK(found.A >= 1.0);
  for (const auto& pt : found.report.points) CHECK(pt.pass_variance);
  CHECK(found.report.increasing);
  // r(u) >= u follows from condition (2).
  for (const auto& pt : found.report.points) CHECK(pt.r >= pt.u);
}

TEST_CASE("step basis with q(w) sizing passes condition (3)") {
  const int n = 4096;
  const auto constants = class_constants(WeightFamily::UniformWindow, {1.0, double(n)}, {n, n});
  const auto cls = step_basis_class(1.0, basis_size(1.0 / std::sqrt(double(n))));
  auto p = make_rate_parameters(constants, weight_cover_log(WeightFamily::UniformWindow, CoverSelector::SingleT, n),
                                iid_profile(), cls, n, 0.05);
  p.log_ninf_h = step_cover_log(1.0);
  p.alpha = 2.0 / 3.0;
  const auto grid = condition_grid(p.cw, p.c1);
  const auto found = find_rate_constant(RateVariant::PropFiveI, p, step_approx_error(1.0), grid);
  for (const auto& pt : found.report.points) {
    CHECK(pt.pass_approx);
    // approximation error <= (1/q)^2 <= u^{4/3}
    CHECK(pt.rhs_approx <= 4.0 * std::pow(pt.u, 4.0 / 3.0) + 1e-15);
  }
}

TEST_CASE("constructed rates respect the A^2 n^2 Lipschitz budget") {
  const auto p = polynomial_mixing_params(10000, 0.05);
  for (auto variant : {RateVariant::PropFiveI, RateVariant::PropFiveII}) {
    const auto found = find_rate_constant(variant, p, zero_approx_error(), condition_grid(p.cw, p.c1));
    const auto fine = condition_grid(p.cw, p.c1, 10000);
    double lip = 0.0;
    for (std::size_t i = 1; i < fine.size(); ++i)
      lip = std::max(lip, (found.rate(fine[i]) - found.rate(fine[i - 1])) / (fine[i] - fine[i - 1]));
    CHECK(lip <= found.A * found.A * p.n * p.n);
    CHECK(lip <= found.report.lipschitz_budget);
  }
}

TEST_CASE("variant (ii) certificate beats variant (i) under polynomial mixing") {
  const int n = 10000;
  const auto p = polynomial_mixing_params(n, 0.05);
  CHECK(p.m_beta == 8);
  const auto grid = condition_grid(p.cw, p.c1);
  const auto one = find_rate_constant(RateVariant::PropFiveI, p, zero_approx_error(), grid);
  const auto two = find_rate_constant(RateVariant::PropFiveII, p, zero_approx_error(), grid);
  const double u = 1.0 / std::sqrt(double(n));
  CHECK(bound_certificate(two.rate, u, 0.05, 0.0) < bound_certificate(one.rate, u, 0.05, 0.0));
}

TEST_CASE("certificate identities") {
  auto p = singleton_params();
  p.n = 100;
  const auto r = custom_rate(p, [](double u) { return 2.0 * u; });
  CHECK(bound_certificate(r, 0.3, std::exp(-1.0), 0.0) == doctest::Approx(0.36).epsilon(1e-14));
  const double d1 = 0.05, d2 = 0.7;
  CHECK(bound_certificate(r, 0.3, 0.1, d1) + d2 - d1 == doctest::Approx(bound_certificate(r, 0.3, 0.1, d2)));
  CHECK_THROWS_AS(bound_certificate(r, 0.3, 0.0, 0.0), std::domain_error);
}

TEST_CASE("unweighted certificate scales like log n / n") {
  for (int n : {1000, 4000, 16000}) {
    auto p = singleton_params();
    p.n = n;
    const auto r = rate_prop5(RateVariant::PropFiveI, p);
    const double cert = bound_certificate(r, 1.0 / std::sqrt(double(n)), 0.05, 0.0);
    const double scale = std::log(double(n)) / n * std::pow(std::log(20.0), 2) * p.c_beta_rho();
    CHECK(cert == doctest::Approx(scale).epsilon(1e-12));
  }
}

TEST_CASE("parameter validation") {
  auto p = singleton_params();
  p.A = 0.5;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = singleton_params();
  p.alpha = 2.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = singleton_params();
  p.delta = 1.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  CHECK(parse_rate_variant("ii") == RateVariant::PropFiveII);
  CHECK_THROWS(parse_rate_variant("iii"));
}
