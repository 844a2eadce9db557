#include "drifterm/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace drifterm {

namespace {

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& base, int k) {
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(base.rows(), base.cols());
  Eigen::MatrixXd square = base;
  while (k > 0) {
    if (k & 1) result = result * square;
    k >>= 1;
    if (k > 0) square = square * square;
  }
  return result;
}

}  // namespace

MixingProfile::MixingProfile(Coefficient beta, Coefficient rho, RhoTail tail, MixingKind kind)
    : beta_(std::move(beta)), rho_(std::move(rho)), tail_(tail), kind_(kind) {
  try {
    k_rho_ = drifterm::k_rho(*this);
  } catch (const std::domain_error&) {
    k_rho_.reset();
  }
}

MixingProfile iid_profile() {
  auto zero_past_lag0 = [](int lag) { return lag == 0 ? 1.0 : 0.0; };
  return MixingProfile(zero_past_lag0, zero_past_lag0, RhoTail::finite(0), MixingKind::Exact);
}

MixingProfile ar1_profile(double phi, std::optional<double> beta_scale,
                          std::optional<double> beta_decay) {
  if (!(std::abs(phi) < 1.0)) throw std::domain_error("AR(1) requires |phi| < 1");
  const double a = std::abs(phi);
  const double scale = beta_scale.value_or(0.5 / std::sqrt(1.0 - phi * phi));
  const double decay = beta_decay.value_or(a);
  if (!(scale > 0.0) || !(decay >= 0.0) || !(decay < 1.0))
    throw std::domain_error("AR(1) beta envelope needs scale > 0 and decay in [0, 1)");
  auto beta = [scale, decay](int lag) {
    return lag == 0 ? 1.0 : std::min(1.0, scale * std::pow(decay, lag));
  };
  auto rho = [a](int lag) { return std::pow(a, lag); };
  return MixingProfile(beta, rho, RhoTail::geometric(1.0, a), MixingKind::AnalyticBound);
}

void validate_stochastic(const Eigen::MatrixXd& transition) {
  if (transition.rows() == 0 || transition.rows() != transition.cols())
    throw std::domain_error("transition matrix must be square and non-empty");
  if ((transition.array() < 0.0).any())
    throw std::domain_error("transition matrix has negative entries");
  const Eigen::VectorXd sums = transition.rowwise().sum();
  if (((sums.array() - 1.0).abs() > 1e-12).any())
    throw std::domain_error("transition matrix rows must sum to 1");
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
  validate_stochastic(transition);
  const Eigen::Index s = transition.rows();
  // Solve pi (P - I) = 0 with sum(pi) = 1 as an overdetermined system.
  Eigen::MatrixXd system(s + 1, s);
  system.topRows(s) = transition.transpose() - Eigen::MatrixXd::Identity(s, s);
  system.row(s).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
  rhs[s] = 1.0;
  Eigen::VectorXd pi = system.colPivHouseholderQr().solve(rhs);
  return pi.cwiseMax(0.0) / pi.cwiseMax(0.0).sum();
}

double beta_markov_exact(const Eigen::MatrixXd& transition,
                         const Eigen::VectorXd& initial, int k, int max_time) {
  validate_stochastic(transition);
  if (k < 0) throw std::domain_error("lag must be nonnegative");
  if (initial.size() != transition.rows() || (initial.array() < 0.0).any() ||
      std::abs(initial.sum() - 1.0) > 1e-12)
    throw std::domain_error("initial law must be a distribution on the state space");

  const Eigen::MatrixXd step_k = matrix_power(transition, k);
  Eigen::RowVectorXd marginal = initial.transpose();
  double best = 0.0;
  for (int t = 0; t < max_time; ++t) {
    const Eigen::RowVectorXd ahead = marginal * step_k;
    double value = 0.0;
    for (Eigen::Index i = 0; i < transition.rows(); ++i)
      value += marginal[i] * (step_k.row(i) - ahead).cwiseAbs().sum();
    best = std::max(best, 0.5 * value);
    const Eigen::RowVectorXd next = marginal * transition;
    if ((next - marginal).lpNorm<1>() < 1e-15) break;
    marginal = next;
  }
  return best;
}

double rho_markov_exact(const Eigen::MatrixXd& transition, int k) {
  if (k < 0) throw std::domain_error("lag must be nonnegative");
  if (k == 0) return 1.0;
  const Eigen::VectorXd pi = stationary_distribution(transition);
  if ((pi.array() <= 0.0).any())
    throw std::domain_error("maximal correlation needs a positive stationary law");
  if (transition.rows() == 1) return 0.0;
  const Eigen::VectorXd root = pi.cwiseSqrt();
  const Eigen::MatrixXd sym =
      root.asDiagonal() * matrix_power(transition, k) * root.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym);
  return std::min(1.0, svd.singularValues()[1]);
}

MixingProfile markov_profile(const Eigen::MatrixXd& transition,
                             std::optional<Eigen::VectorXd> initial) {
  validate_stochastic(transition);
  Eigen::VectorXd init = initial ? *initial : stationary_distribution(transition);
  auto beta = [transition, init](int lag) {
    return lag == 0 ? 1.0 : beta_markov_exact(transition, init, lag);
  };
  auto rho = [transition](int lag) { return rho_markov_exact(transition, lag); };
  const double rho1 = rho_markov_exact(transition, 1);
  // Maximal correlation of a Markov chain is submultiplicative in the lag.
  RhoTail tail = rho1 < 1.0 - 1e-12 ? RhoTail::geometric(1.0, rho1) : RhoTail{};
  return MixingProfile(beta, rho, tail, MixingKind::Exact);
}

MixingProfile beta_only_profile(MixingProfile::Coefficient beta) {
  auto rho = [](int lag) { return lag == 0 ? 1.0 : 0.0; };
  return MixingProfile(std::move(beta), rho, RhoTail::finite(0), MixingKind::AnalyticBound);
}

MBeta m_beta(const MixingProfile& profile, int n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
  if (n < 1) throw std::domain_error("n must be positive");
  for (int m = 1; m <= n; ++m) {
    if (static_cast<double>(n) / m * profile.beta(m) <= delta) return {m, true};
  }
  return {n, false};
}

double k_rho(const MixingProfile& profile, double truncation_tol) {
  const RhoTail& tail = profile.tail();
  double partial = 0.0;
  switch (tail.kind) {
    case RhoTail::Kind::Unknown:
      throw std::domain_error("rho tail cannot be bounded; profile not known summable");
    case RhoTail::Kind::Finite:
      for (int k = 1; k <= tail.support; ++k) partial += profile.rho(k);
      return 1.0 + 2.0 * partial;
    case RhoTail::Kind::Geometric:
      if (!(tail.rate < 1.0) || tail.rate < 0.0)
        throw std::domain_error("geometric rho tail needs ratio in [0, 1)");
      break;
    case RhoTail::Kind::Polynomial:
      if (!(tail.rate > 1.0))
        throw std::domain_error("polynomial rho tail needs exponent > 1");
      break;
  }
  constexpr long kMaxTerms = 50'000'000;
  double tail_bound = 0.0;
  for (long k = 1; k <= kMaxTerms; ++k) {
    partial += profile.rho(static_cast<int>(k));
    if (tail.kind == RhoTail::Kind::Geometric) {
      tail_bound = tail.scale * std::pow(tail.rate, static_cast<double>(k + 1)) / (1.0 - tail.rate);
    } else {
      tail_bound = tail.scale * std::pow(static_cast<double>(k), 1.0 - tail.rate) / (tail.rate - 1.0);
    }
    if (2.0 * tail_bound < truncation_tol * (1.0 + 2.0 * partial)) break;
  }
  return 1.0 + 2.0 * (partial + tail_bound);
}

double blocked_bernstein_tail(double v, double b, int m, const WeightVector& w,
                              double k_rho, double s) {
  if (!(v > 0.0) || !(b > 0.0) || !(s > 0.0) || m < 1 || !(k_rho > 0.0))
    throw std::domain_error("Bernstein tail needs v, b, s, K_rho > 0 and m >= 1");
  const double denom = 8.0 * v * w.l2sq() * k_rho + 3.0 * m * b * w.linf() * s;
  return std::min(1.0, 4.0 * std::exp(-s * s / denom));
}

}  // namespace drifterm
