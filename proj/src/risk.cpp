#include "drifterm/risk.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace drifterm {

namespace {

void check_time(const ProcessSpec& spec, int t, const char* what) {
  if (t < 1 || t > spec.n + 1)
    throw std::out_of_range(std::string(what) + " time " + std::to_string(t) + " outside 1..n+1");
}

// E[Z phi(Z)'] for the linear class on the spec's covariates.
Eigen::MatrixXd feature_cross_moment(const ProcessSpec& spec) {
  if (spec.feature == FeatureMap::Identity) return covariate_second_moment(spec.law, spec.p);
  // int_0^1 z sin(2 pi z) / (2 pi) dz
  return Eigen::MatrixXd::Constant(1, 1, -1.0 / (4.0 * std::numbers::pi * std::numbers::pi));
}

}  // namespace

bool RiskReport::decomposition_holds() const {
  const double slack =
      4.0 * (excess_risk.std_error + learning_error.std_error + drift_error.std_error);
  return excess_risk.value <= 2.0 * (learning_error.value + drift_error.value) + slack;
}

TargetFunction weighted_target(const ProcessSpec& spec, const WeightVector& w) {
  return {spec.feature, population_optimum_w(spec, w)};
}

TargetFunction target_at(const ProcessSpec& spec, int t) {
  return {spec.feature, drift_at(spec, t)};
}

RiskTerm learning_error(const FittedHypothesis& fit, const ProcessSpec& spec, const WeightVector& w,
                        McOptions mc) {
  const auto d = l2_distance(fit, weighted_target(spec, w), spec.law, spec.p, mc);
  return {d.value, d.std_error, d.mode};
}

double drift_error(const ProcessSpec& spec, const WeightVector& w, int t) {
  check_time(spec, t + 1, "target");
  if (w.size() > spec.n) throw std::domain_error("weights extend past the training horizon");
  // sum_i w_i (beta_i - beta_{t+1}) with sum_i w_i = 1; exact zero without drift.
  const Eigen::VectorXd next = drift_at(spec, t + 1);
  Eigen::VectorXd diff = Eigen::VectorXd::Zero(next.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) diff += w[i] * (drift_at(spec, static_cast<int>(i) + 1) - next);
  return diff.dot(feature_second_moment(spec) * diff);
}

RiskTerm excess_risk(const FittedHypothesis& fit, const ProcessSpec& spec, int t, McOptions mc) {
  check_time(spec, t + 1, "target");
  const auto d = l2_distance(fit, target_at(spec, t + 1), spec.law, spec.p, mc);
  return {d.value, d.std_error, d.mode};
}

// With f_P the regression function, E_P[(Y - h)^2] = sigma_P^2 + E f_P^2
// - 2 E[f_P h] + E h^2, so the difference is affine in h and the sup is a
// support function of the class.
double discrepancy(const ProcessSpec& spec, const HypothesisClassSpec& cls, int s, int t) {
  check_time(spec, s, "discrepancy");
  check_time(spec, t, "discrepancy");
  const Eigen::VectorXd cs = drift_at(spec, s);
  const Eigen::VectorXd ct = drift_at(spec, t);
  const Eigen::MatrixXd phi2 = feature_second_moment(spec);
  const double base = noise_variance(spec, s) - noise_variance(spec, t) + cs.dot(phi2 * cs) -
                      ct.dot(phi2 * ct);
  switch (cls.kind) {
    case HypothesisKind::LinearBall: {
      if (cls.input_dim != spec.p) throw std::domain_error("class dimension does not match the process");
      const Eigen::VectorXd gap = feature_cross_moment(spec) * (cs - ct);
      return base + 2.0 * cls.bound * gap.norm();
    }
    case HypothesisKind::StepBasis: {
      if (spec.law != CovariateLaw::UnitInterval)
        throw DiscrepancyUnavailable("step-basis discrepancy needs the unit-interval law");
      const TargetFunction gap{spec.feature, cs - ct};
      double support = 0.0;
      for (int j = 0; j < cls.q; ++j)
        support += std::abs(target_integral(gap, double(j) / cls.q, double(j + 1) / cls.q));
      return base + 2.0 * cls.bound * support;
    }
    case HypothesisKind::ReluNet:
      throw DiscrepancyUnavailable("discrepancy is not available for ReLU networks");
  }
  throw std::logic_error("unhandled hypothesis class");
}

double discrepancy_sum(const ProcessSpec& spec, const HypothesisClassSpec& cls,
                       std::optional<int> last) {
  const int end = last.value_or(spec.n + 1);
  check_time(spec, end, "discrepancy");
  double total = 0.0;
  for (int t = 2; t <= end; ++t) total += discrepancy(spec, cls, t, t - 1);
  return total;
}

RiskReport risk_report(const FittedHypothesis& fit, const ProcessSpec& spec, const WeightVector& w,
                       bool with_discrepancy, McOptions mc) {
  const int t = w.spec().t;
  RiskReport report;
  report.target_time = t + 1;
  report.excess_risk = excess_risk(fit, spec, t, mc);
  report.learning_error = learning_error(fit, spec, w, mc);
  report.drift_error = {drift_error(spec, w, t), 0.0, DistanceMode::Exact};
  if (with_discrepancy) {
    try {
      report.discrepancy_sum = discrepancy_sum(spec, fit.cls, t + 1);
    } catch (const DiscrepancyUnavailable&) {
      report.discrepancy_sum.reset();
    }
  }
  return report;
}

}  // namespace drifterm
