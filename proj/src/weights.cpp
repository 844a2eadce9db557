#include "drifterm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace drifterm {

namespace {

bool is_integral(double x) { return std::abs(x - std::round(x)) < 1e-9; }

// theta_k, k = 0..count-1, geometric between lo and hi (lo > 0).
std::vector<double> geometric_grid(double lo, double hi, int count) {
  std::vector<double> grid;
  if (count <= 1 || lo == hi) {
    grid.push_back(lo);
    if (hi != lo) grid.push_back(hi);
    return grid;
  }
  grid.reserve(static_cast<std::size_t>(count));
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (count - 1);
  for (int k = 0; k < count; ++k) grid.push_back(std::exp(log_lo + step * k));
  grid.back() = hi;
  return grid;
}

Interval clamp_open_domain(WeightFamily family, Interval range) {
  if (!(range.lo >= 0.0) || !(range.hi >= range.lo) || !std::isfinite(range.hi))
    throw std::domain_error("parameter range must satisfy 0 <= lo <= hi < inf");
  if (range.lo == 0.0) range.lo = std::min(kDomainEndpointGap, range.hi);
  if (range.hi == 0.0) throw std::domain_error("parameter range is empty");
  if (family == WeightFamily::BrownDES && range.hi > 1.0)
    throw std::domain_error("BrownDES parameter range must lie in (0, 1]");
  return range;
}

}  // namespace

std::string_view to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::UniformWindow: return "uniform";
    case WeightFamily::ExponentialSmoothing: return "exp";
    case WeightFamily::BrownDES: return "brown";
  }
  return "unknown";
}

WeightFamily parse_weight_family(std::string_view name) {
  if (name == "uniform") return WeightFamily::UniformWindow;
  if (name == "exp" || name == "exponential") return WeightFamily::ExponentialSmoothing;
  if (name == "brown") return WeightFamily::BrownDES;
  throw std::invalid_argument("unknown weight family: " + std::string(name));
}

void WeightSpec::validate() const {
  if (n < 1 || t < 1 || t > n)
    throw std::domain_error("weight spec requires 1 <= t <= n");
  switch (family) {
    case WeightFamily::UniformWindow:
      if (!is_integral(param) || param < 1.0 || param > t)
        throw std::domain_error("uniform window length must be an integer in [1, t]");
      break;
    case WeightFamily::ExponentialSmoothing:
      if (!(param > 0.0) || !std::isfinite(param))
        throw std::domain_error("exponential smoothing requires theta > 0");
      break;
    case WeightFamily::BrownDES:
      if (!(param > 0.0) || param > 1.0)
        throw std::domain_error("Brown double exponential smoothing requires theta in (0, 1]");
      break;
  }
}

WeightVector::WeightVector(WeightSpec spec, Eigen::VectorXd entries)
    : spec_(spec), entries_(std::move(entries)) {
  l1_ = entries_.lpNorm<1>();
  l2sq_ = entries_.squaredNorm();
  linf_ = entries_.lpNorm<Eigen::Infinity>();
  sum_ = entries_.sum();
}

double brown_block(double theta, int lag) {
  const double r = 1.0 - theta;
  // 0^0 == 1 keeps b_0 = 2 - theta at theta = 1.
  return (2.0 - theta * (lag + 1)) * std::pow(r, lag);
}

double brown_block_sum(double theta, int t) {
  const double r = 1.0 - theta;
  return (1.0 + std::pow(r, t) * (t * theta - 1.0)) / theta;
}

double exp_spikiness(double theta, int t) {
  const double rho = std::exp(-theta);
  return (1.0 + rho) / (1.0 + std::exp(-theta * t));
}

double exp_l2sq(double theta, int t) {
  // (1 - rho)(1 + rho^t) / ((1 + rho)(1 - rho^t)), written with expm1 so
  // small theta does not cancel.
  const double one_minus_rho = -std::expm1(-theta);
  const double one_minus_rho_t = -std::expm1(-theta * t);
  return one_minus_rho * (1.0 + std::exp(-theta * t)) /
         ((1.0 + std::exp(-theta)) * one_minus_rho_t);
}

double exp_theta_for_neff(double n_eff, int t) {
  if (!(n_eff > 1.0) || !(n_eff < t))
    throw std::domain_error("target effective sample size must lie in (1, t)");
  double lo = 1e-14;
  double hi = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (1.0 / exp_l2sq(mid, t) > n_eff)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

WeightVector make_weights(const WeightSpec& spec) {
  spec.validate();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(spec.n);
  const int t = spec.t;
  switch (spec.family) {
    case WeightFamily::UniformWindow: {
      const int s = static_cast<int>(std::lround(spec.param));
      w.segment(t - s, s).setConstant(1.0 / s);
      break;
    }
    case WeightFamily::ExponentialSmoothing: {
      double total = 0.0;
      for (int k = 0; k < t; ++k) {
        const double v = std::exp(-spec.param * k);
        w[t - 1 - k] = v;
        total += v;
      }
      w.head(t) /= total;
      break;
    }
    case WeightFamily::BrownDES: {
      const double closed = brown_block_sum(spec.param, t);
      if (!(closed > 0.0))
        throw std::logic_error("Brown normalizer is nonpositive: " + std::to_string(closed));
      double total = 0.0;
      for (int k = 0; k < t; ++k) {
        const double v = brown_block(spec.param, k);
        w[t - 1 - k] = v;
        total += v;
      }
      if (!(total > 0.0))
        throw std::logic_error("Brown normalizer is nonpositive: " + std::to_string(total));
      w.head(t) /= total;
      break;
    }
  }
  return WeightVector(spec, std::move(w));
}

WeightVector uniform_weights(int n) {
  return make_weights({WeightFamily::UniformWindow, n, n, static_cast<double>(n)});
}

WeightClassConstants class_constants(WeightFamily family, Interval param_range,
                                     IntRange t_range, int grid_points) {
  if (t_range.lo < 1 || t_range.hi < t_range.lo)
    throw std::domain_error("time range must satisfy 1 <= lo <= hi");
  WeightClassConstants out;

  switch (family) {
    case WeightFamily::UniformWindow: {
      const int s_lo = static_cast<int>(std::ceil(std::max(1.0, param_range.lo) - 1e-9));
      const int s_hi = static_cast<int>(std::floor(param_range.hi + 1e-9));
      if (s_hi < s_lo || s_lo > t_range.hi)
        throw std::domain_error("window-length range is empty or exceeds t");
      const int s_max = std::min(s_hi, t_range.hi);
      out.c1 = 1.0;
      out.bw = 1.0;
      out.cw = 1.0 / std::sqrt(static_cast<double>(s_max));
      out.exact = true;
      break;
    }
    case WeightFamily::ExponentialSmoothing: {
      const Interval range = clamp_open_domain(family, param_range);
      const auto grid = geometric_grid(range.lo, range.hi, grid_points);
      // The ratio (1 + rho)/(1 + rho^t) grows with t and ||w||^2 shrinks
      // with t and grows with theta, so t_hi and theta_lo are extremal.
      double bw = 0.0;
      for (double theta : grid) bw = std::max(bw, exp_spikiness(theta, t_range.hi));
      out.c1 = 1.0;
      out.bw = bw;
      out.cw = std::sqrt(exp_l2sq(range.lo, t_range.hi));
      out.exact = grid.size() == 1 || t_range.hi == 1;
      out.grid_points = static_cast<int>(grid.size());
      break;
    }
    case WeightFamily::BrownDES: {
      const Interval range = clamp_open_domain(family, param_range);
      const auto grid = geometric_grid(range.lo, range.hi, grid_points);
      double c1 = 0.0;
      double bw = 0.0;
      double min_l2sq = std::numeric_limits<double>::infinity();
      for (double theta : grid) {
        // b_k does not depend on t, so one pass over lags yields every t.
        double sum = 0.0, abs_sum = 0.0, sq_sum = 0.0, max_abs = 0.0;
        for (int k = 0; k < t_range.hi; ++k) {
          const double b = brown_block(theta, k);
          sum += b;
          abs_sum += std::abs(b);
          sq_sum += b * b;
          max_abs = std::max(max_abs, std::abs(b));
          if (k + 1 < t_range.lo) continue;
          if (!(sum > 0.0)) throw std::logic_error("Brown normalizer is nonpositive");
          c1 = std::max(c1, abs_sum / sum);
          bw = std::max(bw, max_abs * sum / sq_sum);
          min_l2sq = std::min(min_l2sq, sq_sum / (sum * sum));
        }
      }
      out.c1 = c1;
      out.bw = bw;
      out.cw = std::sqrt(min_l2sq);
      out.exact = false;
      out.grid_points = static_cast<int>(grid.size());
      break;
    }
  }
  out.n_eff_max = 1.0 / (out.cw * out.cw);
  return out;
}

std::vector<WeightSpec> build_weight_net(WeightFamily family,
                                         Interval param_range, int t, int n,
                                         double epsilon) {
  if (!(epsilon > 0.0)) throw std::domain_error("net radius must be positive");
  if (t < 1 || t > n) throw std::domain_error("net requires 1 <= t <= n");
  std::vector<WeightSpec> net;

  if (family == WeightFamily::UniformWindow) {
    const int s_lo = std::max(1, static_cast<int>(std::ceil(param_range.lo - 1e-9)));
    const int s_hi = std::min(t, static_cast<int>(std::floor(param_range.hi + 1e-9)));
    for (int s = s_lo; s <= s_hi; ++s) net.push_back({family, t, n, static_cast<double>(s)});
    if (net.empty()) throw std::domain_error("window-length range is empty");
    return net;
  }

  const Interval range = clamp_open_domain(family, param_range);
  const double lipschitz =
      family == WeightFamily::ExponentialSmoothing ? static_cast<double>(t - 1) : 20.0 * t;
  if (lipschitz == 0.0) {
    // t = 1: every member is the point mass on index 1.
    net.push_back({family, t, n, range.hi});
    return net;
  }
  const double eta = epsilon / lipschitz;
  const double width = range.hi - range.lo;
  const auto count = static_cast<long long>(std::max(1.0, std::ceil(width / (2.0 * eta))));
  if (count > 100'000'000) throw std::length_error("weight net too large");
  net.reserve(static_cast<std::size_t>(count));
  for (long long k = 0; k < count; ++k) {
    const double center = std::min(range.lo + eta * (2.0 * k + 1.0), range.hi);
    net.push_back({family, t, n, center});
  }
  return net;
}

double covering_number_bound(WeightFamily family, CoverSelector selector,
                             int t_or_n, double epsilon, double exp_upper) {
  if (!(epsilon > 0.0)) throw std::domain_error("covering radius must be positive");
  if (t_or_n < 1) throw std::domain_error("covering bound requires t >= 1");
  const double m = t_or_n;
  const bool single = selector == CoverSelector::SingleT;
  double bound = 0.0;
  switch (family) {
    case WeightFamily::UniformWindow:
      bound = single ? m : m * m / 2.0;
      break;
    case WeightFamily::ExponentialSmoothing:
      bound = single ? 3.0 * exp_upper * (m - 1.0) / epsilon
                     : 3.0 * exp_upper * m * m / (2.0 * epsilon);
      break;
    case WeightFamily::BrownDES:
      bound = single ? 60.0 * m / epsilon : 60.0 * m * m / epsilon;
      break;
  }
  return std::max(1.0, bound);
}

}  // namespace drifterm
