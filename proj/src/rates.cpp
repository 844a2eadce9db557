#include "drifterm/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace drifterm {

namespace {

double checked_log_cover(double value, const char* what) {
  if (!std::isfinite(value) || value < 0.0)
    throw std::domain_error(std::string(what) + " covering function undefined at the required epsilon");
  return value;
}

double log_ratio_floor(double num, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("covering radius must be positive");
  return std::log(std::max(1.0, num / eps));
}

}  // namespace

double RateParameters::c_beta_inf() const {
  if (!(c_inf > 0.0)) return std::numeric_limits<double>::infinity();
  return m_beta * bw * c_p / c_inf;
}

void RateParameters::validate() const {
  if (!(A >= 1.0)) throw std::domain_error("A must be >= 1");
  if (K && !(*K > 0.0)) throw std::domain_error("K must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
  if (!(alpha >= 0.0 && alpha < 2.0)) throw std::domain_error("alpha must lie in [0, 2)");
  if (!(c_p >= 1.0)) throw std::domain_error("C_P must be >= 1");
  if (!(c_l > 0.0)) throw std::domain_error("C_L must be positive");
  if (!(cw > 0.0) || !(c1 >= cw) || !(bw >= 0.0)) throw std::domain_error("invalid weight class constants");
  if (m_beta < 1 || !(n >= 1.0)) throw std::domain_error("m_beta and n must be positive");
  if (!(k_rho >= 1.0)) throw std::domain_error("K_rho must be >= 1");
  if (!log_n1_w || !log_ninf_h) throw std::domain_error("covering functions are required");
}

WeightCoverFn weight_cover_log(WeightFamily family, CoverSelector selector, int t_or_n,
                               double exp_upper) {
  return [=](double eps) {
    return std::log(covering_number_bound(family, selector, t_or_n, eps, exp_upper));
  };
}

HypothesisCoverFn linear_cover_log(int p, double bound) {
  return [=](double eps, double) { return p * log_ratio_floor(3.0 * bound, eps); };
}

HypothesisCoverFn step_cover_log(double bound) {
  return [=](double eps, double u) { return basis_size(u) * log_ratio_floor(3.0 * bound, eps); };
}

HypothesisCoverFn net_cover_log(int n, double sizing_const) {
  return [=](double eps, double u) {
    return sizing_const * std::pow(u, -2.0 / 3.0) * log_ratio_floor(double(n), eps);
  };
}

HypothesisCoverFn singleton_cover_log() {
  return [](double, double) { return 0.0; };
}

HypothesisCoverFn cover_log_for(const HypothesisClassSpec& cls, int n) {
  switch (cls.kind) {
    case HypothesisKind::LinearBall: return linear_cover_log(cls.input_dim, cls.bound);
    case HypothesisKind::StepBasis: return step_cover_log(cls.bound);
    case HypothesisKind::ReluNet: return net_cover_log(n);
  }
  throw std::logic_error("unhandled hypothesis class");
}

double eps_weights(const RateParameters& params) {
  return std::pow(params.cw, 3) / (64.0 * (1.0 + params.c1 * params.lipschitz_budget()));
}

double eps_hypotheses(const RateParameters& params, double w_l2) {
  return w_l2 * w_l2 / (32.0 * params.c1);
}

double kw(const RateParameters& params, double w_l2) {
  const double tol = 1e-12;
  if (!(w_l2 >= params.cw * (1.0 - tol)) || !(w_l2 <= std::max(1.0, params.c1) * (1.0 + tol)))
    throw std::domain_error("||w|| = " + std::to_string(w_l2) + " outside [C_W, 1]");
  if (!params.log_n1_w || !params.log_ninf_h) throw std::domain_error("covering functions are required");
  const double weights = checked_log_cover(params.log_n1_w(eps_weights(params)), "weight");
  const double hyp =
      checked_log_cover(params.log_ninf_h(eps_hypotheses(params, w_l2), w_l2), "hypothesis");
  return 4.0 + weights + 2.0 * hyp;
}

std::string_view to_string(RateVariant variant) {
  switch (variant) {
    case RateVariant::PropFiveI: return "i";
    case RateVariant::PropFiveII: return "ii";
    case RateVariant::Custom: return "custom";
  }
  return "unknown";
}

RateVariant parse_rate_variant(std::string_view name) {
  if (name == "i" || name == "1") return RateVariant::PropFiveI;
  if (name == "ii" || name == "2") return RateVariant::PropFiveII;
  throw std::invalid_argument("unknown rate variant: " + std::string(name));
}

RateFunction rate_prop5(RateVariant variant, const RateParameters& params) {
  params.validate();
  const double n = params.n;
  const double log_n = std::log(n);
  const double a = params.A;
  const double alpha = params.alpha;
  RateFunction out;
  out.variant = variant;
  out.params = params;
  if (variant == RateVariant::PropFiveI) {
    const double c = params.c_beta_rho();
    if (c > n)
      throw RatePreconditionError("C_{beta,rho} = " + std::to_string(c) + " exceeds n");
    const double scale = std::sqrt(a * c * log_n);
    out.evaluation = [=](double u) { return std::pow(u, 1.0 - alpha / 2.0) * scale; };
    return out;
  }
  if (variant == RateVariant::PropFiveII) {
    const double c_rho = params.c_p * params.c_p * params.k_rho;
    const double c_inf = params.c_beta_inf();
    if (c_rho > n)
      throw RatePreconditionError("C_P^2 K_rho = " + std::to_string(c_rho) + " exceeds n");
    if (!std::isfinite(c_inf) || c_inf > n)
      throw RatePreconditionError("C_{beta,inf} = " + std::to_string(c_inf) + " exceeds n");
    const double scale = std::sqrt(a * c_rho * log_n);
    const double linear = a * c_inf * log_n;
    out.evaluation = [=](double u) {
      return std::pow(u, 1.0 - alpha / 2.0) * scale + linear * std::pow(u, 2.0 - alpha);
    };
    return out;
  }
  throw std::invalid_argument("rate_prop5 needs variant i or ii");
}

RateFunction custom_rate(const RateParameters& params, std::function<double(double)> r) {
  return {RateVariant::Custom, params, std::move(r)};
}

ApproxErrorFn step_approx_error(double lipschitz) {
  return [=](double u) {
    const double half_bin = 0.5 / basis_size(std::min(1.0, u));
    return lipschitz * lipschitz * half_bin * half_bin;
  };
}

std::vector<double> condition_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::domain_error("grid needs 0 < lo <= hi");
  if (hi == lo) return {lo};
  std::vector<double> grid{lo};
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (points + 1);
  for (int i = 1; i <= points; ++i) grid.push_back(std::exp(log_lo + step * i));
  grid.push_back(hi);
  return grid;
}

RateConditionReport check_rate_conditions(const RateFunction& r, const RateParameters& params,
                                          const ApproxErrorFn& approx_err,
                                          const std::vector<double>& grid) {
  RateConditionReport report;
  report.lipschitz_budget = params.lipschitz_budget();
  report.min_slack = std::numeric_limits<double>::infinity();
  report.pass = !grid.empty();
  const double c_rho = params.c_p * params.c_p * params.k_rho;
  const double beta_part = params.m_beta * params.bw;
  for (double u : grid) {
    RateConditionPoint pt;
    pt.u = u;
    pt.r = r(u);
    pt.kw = kw(params, u);
    const double cap = params.c_inf > 0.0 ? std::min(2.0, params.c_p * pt.r / params.c_inf) : 2.0;
    pt.rhs_variance = pt.kw * u * u * (c_rho + beta_part * cap);
    pt.rhs_approx = 4.0 * params.c_l * (approx_err ? approx_err(u) : 0.0);
    const double r2 = pt.r * pt.r;
    pt.pass_variance = r2 >= pt.rhs_variance;
    pt.pass_approx = r2 >= pt.rhs_approx;
    const double rhs = std::max(pt.rhs_variance, pt.rhs_approx);
    pt.slack = rhs > 0.0 ? r2 / rhs : std::numeric_limits<double>::infinity();
    report.min_slack = std::min(report.min_slack, pt.slack);
    report.pass = report.pass && pt.pass_variance && pt.pass_approx;
    report.points.push_back(pt);
  }
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    const auto& a = report.points[i - 1];
    const auto& b = report.points[i];
    if (b.u == a.u) continue;
    report.lipschitz = std::max(report.lipschitz, std::abs(b.r - a.r) / (b.u - a.u));
    if (b.r < a.r) report.increasing = false;
  }
  return report;
}

RateSearch find_rate_constant(RateVariant variant, RateParameters params,
                              const ApproxErrorFn& approx_err, const std::vector<double>& grid,
                              int max_doublings) {
  params.A = 1.0;
  for (int d = 0; d <= max_doublings; ++d) {
    RateFunction rate = rate_prop5(variant, params);
    RateConditionReport report = check_rate_conditions(rate, params, approx_err, grid);
    if (report.pass) return {params.A, d, std::move(rate), std::move(report)};
    params.A *= 2.0;
  }
  throw std::runtime_error("no A <= 2^" + std::to_string(max_doublings) +
                           " satisfies the rate conditions");
}

double bound_certificate(const RateFunction& r, double w_l2, double delta, double drift_term) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
  const double rate = r(w_l2);
  const double log_delta = std::log(1.0 / delta);
  return rate * rate * log_delta * log_delta + drift_term;
}

RateParameters make_rate_parameters(const WeightClassConstants& weights, WeightCoverFn log_n1_w,
                                    const MixingProfile& mixing, const HypothesisClassSpec& cls,
                                    int n, double delta) {
  RateParameters params;
  params.c1 = weights.c1;
  params.cw = weights.cw;
  params.bw = weights.bw;
  const MBeta mb = m_beta(mixing, n, delta);
  if (!mb.found) throw RatePreconditionError("no block length m <= n meets (n/m) beta(m) <= delta");
  params.m_beta = mb.m;
  params.k_rho = k_rho(mixing);
  params.c_inf = cls.c_inf;
  params.alpha = cls.alpha;
  params.delta = delta;
  params.n = n;
  params.log_n1_w = std::move(log_n1_w);
  params.log_ninf_h = cover_log_for(cls, n);
  params.validate();
  return params;
}

}  // namespace drifterm
