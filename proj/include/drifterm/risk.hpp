#pragma once

#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "drifterm/hypotheses.hpp"
#include "drifterm/processes.hpp"
#include "drifterm/weights.hpp"

namespace drifterm {

struct RiskTerm {
  double value = 0.0;
  double std_error = 0.0;
  DistanceMode mode = DistanceMode::Exact;
};

/// Square-loss decomposition at target time t + 1:
///   excess   = ||h_hat - h*_{t+1}||^2
///   learning = ||h_hat - h*_w||^2
///   drift    = ||h*_w  - h*_{t+1}||^2
/// where h*_w = sum_t w_t f_t is the weighted regression function and all
/// norms are L2 under the (time-invariant) covariate law.
struct RiskReport {
  int target_time = 0;  ///< t + 1
  RiskTerm excess_risk;
  RiskTerm learning_error;
  RiskTerm drift_error;
  std::optional<double> discrepancy_sum;  ///< absent when unavailable for the class

  /// excess <= 2 (learning + drift) + 4 stderr
  bool decomposition_holds() const;
};

/// z -> beta*_w' phi(z)
TargetFunction weighted_target(const ProcessSpec& spec, const WeightVector& w);
/// z -> beta*_t' phi(z), t in 1..n+1
TargetFunction target_at(const ProcessSpec& spec, int t);

RiskTerm learning_error(const FittedHypothesis& fit, const ProcessSpec& spec, const WeightVector& w,
                        McOptions mc = {});

/// (beta*_w - beta*_{t+1})' E[phi phi'] (beta*_w - beta*_{t+1}); needs t + 1 <= n + 1.
double drift_error(const ProcessSpec& spec, const WeightVector& w, int t);

RiskTerm excess_risk(const FittedHypothesis& fit, const ProcessSpec& spec, int t, McOptions mc = {});

/// Raised when no closed form for the discrepancy is available.
class DiscrepancyUnavailable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// dis(P_s, P_t) = sup_{h in H} E_{P_s}[(Y - h(Z))^2] - E_{P_t}[(Y - h(Z))^2]
/// in closed form for linear balls and step bases; s, t in 1..n+1.
double discrepancy(const ProcessSpec& spec, const HypothesisClassSpec& cls, int s, int t);

/// sum_{t=2}^{last} dis(P_t, P_{t-1}); last defaults to n + 1.
double discrepancy_sum(const ProcessSpec& spec, const HypothesisClassSpec& cls,
                       std::optional<int> last = std::nullopt);

/// Full report for a fit on observations 1..t with t = w.spec().t.
RiskReport risk_report(const FittedHypothesis& fit, const ProcessSpec& spec, const WeightVector& w,
                       bool with_discrepancy = false, McOptions mc = {});

}  // namespace drifterm
