#include "drifterm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "drifterm/random.hpp"
#include "drifterm/risk.hpp"

namespace drifterm {

namespace {

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

Interval family_domain(WeightFamily family, int n, double exp_upper) {
  switch (family) {
    case WeightFamily::UniformWindow: return {1.0, double(n)};
    case WeightFamily::ExponentialSmoothing: return {0.0, exp_upper};
    case WeightFamily::BrownDES: return {0.0, 1.0};
  }
  throw std::logic_error("unhandled weight family");
}

// Lipschitz constant of the scalar regression functions on the unit interval.
double target_lipschitz(const ProcessSpec& spec) {
  double best = 0.0;
  for (int t = 1; t <= spec.n + 1; ++t) best = std::max(best, drift_at(spec, t).cwiseAbs().maxCoeff());
  return best;
}

RateSearch rate_with_constants(const ExperimentConfig& cfg, int n, const WeightSpec& member,
                               const WeightClassConstants& constants) {
  const ProcessSpec spec = cfg.process.with_n(n);
  const WeightVector w = make_weights(member);
  const HypothesisClassSpec cls = cfg.cls.for_weights(spec, w.l2());
  const bool sized = cfg.cls.sizing != ClassSizing::Fixed;

  RateParameters params = make_rate_parameters(
      constants, weight_cover_log(cfg.weights.family, CoverSelector::SingleT, n, cfg.weights.exp_upper),
      spec.core.profile(), cls, n, cfg.delta);
  ApproxErrorFn approx = zero_approx_error();
  if (cls.kind == HypothesisKind::StepBasis) {
    const double lipschitz = target_lipschitz(spec);
    if (sized) {
      approx = step_approx_error(lipschitz);
    } else {
      const int q = cls.q;
      const double bound = cls.bound;
      params.alpha = 0.0;
      params.log_ninf_h = [=](double eps, double) { return q * std::log(std::max(1.0, 3.0 * bound / eps)); };
      approx = [=](double) { return std::pow(lipschitz / (2.0 * q), 2); };
    }
  } else if (cls.kind == HypothesisKind::ReluNet) {
    params.log_ninf_h = net_cover_log(n, cfg.cls.sizing_const);
    if (!sized) params.alpha = 0.0;
  }
  const auto grid = condition_grid(params.cw, params.c1);
  return find_rate_constant(cfg.rate_variant, params, approx, grid);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t WeightGrid::size() const {
  if (full) return 1;
  return family == WeightFamily::ExponentialSmoothing && !n_eff.empty() ? n_eff.size() : params.size();
}

std::vector<WeightSpec> WeightGrid::members(int n) const {
  std::vector<WeightSpec> out;
  auto push = [&](double param) {
    WeightSpec spec{family, n, n, param};
    spec.validate();
    out.push_back(spec);
  };
  if (full) {
    if (family != WeightFamily::UniformWindow) throw std::domain_error("'full' applies to uniform windows");
    push(double(n));
  } else if (!n_eff.empty()) {
    if (family != WeightFamily::ExponentialSmoothing)
      throw std::domain_error("n_eff targets apply to exponential weights");
    for (double target : n_eff) push(exp_theta_for_neff(target, n));
  } else {
    for (double param : params) push(param);
  }
  return out;
}

std::string_view to_string(ClassSizing sizing) {
  switch (sizing) {
    case ClassSizing::Fixed: return "fixed";
    case ClassSizing::BasisSize: return "basis_size";
    case ClassSizing::NetWidth: return "net_width";
  }
  return "unknown";
}

ClassSizing parse_class_sizing(std::string_view name) {
  if (name == "fixed") return ClassSizing::Fixed;
  if (name == "basis_size") return ClassSizing::BasisSize;
  if (name == "net_width") return ClassSizing::NetWidth;
  throw std::invalid_argument("unknown class sizing: " + std::string(name));
}

HypothesisClassSpec ClassPolicy::for_weights(const ProcessSpec& spec, double w_l2) const {
  switch (kind) {
    case HypothesisKind::LinearBall:
      return linear_ball_class(bound, covariate_second_moment(spec.law, spec.p));
    case HypothesisKind::StepBasis:
      return step_basis_class(bound, sizing == ClassSizing::BasisSize ? basis_size(std::min(1.0, w_l2)) : q);
    case HypothesisKind::ReluNet: {
      const int nu = sizing == ClassSizing::NetWidth ? relu_width_for(std::min(1.0, w_l2), layers, sizing_const)
                                                     : width;
      return relu_net_class(bound, spec.p, nu, layers, param_bound);
    }
  }
  throw std::logic_error("unhandled hypothesis class");
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw std::domain_error("n grid is empty");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw std::domain_error("n grid must be strictly increasing");
  if (n_grid.front() < 1) throw std::domain_error("n grid entries must be positive");
  if (replications < 1) throw std::domain_error("replications must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
  if (weights.size() == 0) throw std::domain_error("weight grid is empty");
  if (mc_draws < 2) throw std::domain_error("mc_draws must be at least 2");
  process.with_n(n_grid.front()).validate();
  if (slope) {
    if (replications < 30) throw std::domain_error("slope experiments need >= 30 replications");
    if (slope->x_field == "n") {
      if (n_grid.size() < 5) throw std::domain_error("slope experiments need >= 5 n values");
      if (n_grid.back() < 4 * n_grid.front())
        throw std::domain_error("n grid must span at least two octaves");
    } else if (static_cast<int>(weights.size()) < slope->min_points) {
      throw std::domain_error("slope needs at least min_points weight members");
    }
  }
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.name = value_or<std::string>(j, "name", cfg.name);
  json process = j.at("process");
  cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
  if (!cfg.n_grid.empty() && !process.contains("n")) process["n"] = cfg.n_grid.front();
  cfg.process = process_spec_from_json(process);

  const json& wj = j.at("weights");
  cfg.weights.family = parse_weight_family(wj.at("family").get<std::string>());
  cfg.weights.exp_upper = value_or(wj, "exp_upper", kDefaultExpUpper);
  cfg.weights.full = value_or(wj, "full", false);
  if (wj.contains("params")) cfg.weights.params = wj.at("params").get<std::vector<double>>();
  if (wj.contains("n_eff")) cfg.weights.n_eff = wj.at("n_eff").get<std::vector<double>>();
  const int selectors = int(cfg.weights.full) + int(!cfg.weights.params.empty()) + int(!cfg.weights.n_eff.empty());
  if (selectors != 1) throw std::invalid_argument("weights need exactly one of full, params, n_eff");

  const json& cj = j.at("class");
  cfg.cls.kind = parse_hypothesis_kind(cj.at("kind").get<std::string>());
  cfg.cls.bound = cj.at("bound").get<double>();
  cfg.cls.sizing = parse_class_sizing(value_or<std::string>(cj, "sizing", "fixed"));
  cfg.cls.q = value_or(cj, "q", 1);
  cfg.cls.width = value_or(cj, "width", 8);
  cfg.cls.layers = value_or(cj, "layers", 1);
  cfg.cls.param_bound = value_or(cj, "param_bound", 1.0);
  cfg.cls.sizing_const = value_or(cj, "sizing_const", 1.0);

  cfg.replications = value_or(j, "replications", cfg.replications);
  cfg.delta = value_or(j, "delta", cfg.delta);
  cfg.base_seed = value_or<std::uint64_t>(j, "base_seed", cfg.base_seed);
  cfg.rate_variant = parse_rate_variant(value_or<std::string>(j, "rate_variant", "i"));
  cfg.mc_draws = value_or(j, "mc_draws", cfg.mc_draws);
  if (j.contains("net")) {
    cfg.net.step = value_or(j.at("net"), "step", cfg.net.step);
    cfg.net.iterations = value_or(j.at("net"), "iterations", cfg.net.iterations);
  }
  if (j.contains("slope") && !j.at("slope").is_null()) {
    const json& sj = j.at("slope");
    SlopeSpec s;
    s.x_field = value_or<std::string>(sj, "x_field", s.x_field);
    s.y_field = value_or<std::string>(sj, "y_field", s.y_field);
    s.target = sj.at("target").get<double>();
    s.tolerance = value_or(sj, "tolerance", s.tolerance);
    s.min_r2 = value_or(sj, "min_r2", s.min_r2);
    s.min_points = value_or(sj, "min_points", s.min_points);
    cfg.slope = s;
  }
  if (j.contains("outputs")) cfg.out_dir = value_or<std::string>(j.at("outputs"), "dir", "");
  cfg.validate();
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json weights{{"family", to_string(cfg.weights.family)}, {"exp_upper", cfg.weights.exp_upper}};
  if (cfg.weights.full) weights["full"] = true;
  if (!cfg.weights.params.empty()) weights["params"] = cfg.weights.params;
  if (!cfg.weights.n_eff.empty()) weights["n_eff"] = cfg.weights.n_eff;
  json cls{{"kind", to_string(cfg.cls.kind)}, {"bound", cfg.cls.bound}, {"sizing", to_string(cfg.cls.sizing)}};
  if (cfg.cls.kind == HypothesisKind::StepBasis && cfg.cls.sizing == ClassSizing::Fixed) cls["q"] = cfg.cls.q;
  if (cfg.cls.kind == HypothesisKind::ReluNet) {
    cls["layers"] = cfg.cls.layers;
    cls["param_bound"] = cfg.cls.param_bound;
    if (cfg.cls.sizing == ClassSizing::Fixed)
      cls["width"] = cfg.cls.width;
    else
      cls["sizing_const"] = cfg.cls.sizing_const;
  }
  json j{{"name", cfg.name},
         {"process", to_json(cfg.process)},
         {"weights", weights},
         {"class", cls},
         {"n_grid", cfg.n_grid},
         {"replications", cfg.replications},
         {"delta", cfg.delta},
         {"base_seed", cfg.base_seed},
         {"rate_variant", to_string(cfg.rate_variant)},
         {"mc_draws", cfg.mc_draws},
         {"net", {{"step", cfg.net.step}, {"iterations", cfg.net.iterations}}}};
  j["process"].erase("n");
  if (cfg.slope) {
    j["slope"] = {{"x_field", cfg.slope->x_field},
                  {"y_field", cfg.slope->y_field},
                  {"target", cfg.slope->target},
                  {"tolerance", cfg.slope->tolerance},
                  {"min_r2", cfg.slope->min_r2},
                  {"min_points", cfg.slope->min_points}};
  }
  return j;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  json j = read_json_file(path);
  if (const char* env = std::getenv("DRIFTERM_SEED"); env && *env) {
    try {
      j["base_seed"] = std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("DRIFTERM_SEED is not an unsigned integer: ") + env);
    }
  }
  return experiment_config_from_json(j);
}

double ResultRow::field(std::string_view name) const {
  if (name == "n") return n;
  if (name == "n_eff") return n_eff();
  if (name == "w_l2") return w_l2;
  if (name == "param") return param;
  if (name == "learning_error") return learning_error;
  if (name == "drift_error") return drift_error;
  if (name == "excess_risk") return excess_risk;
  if (name == "rate_term") return rate_term;
  if (name == "certificate") return certificate;
  throw std::invalid_argument("unknown result field: " + std::string(name));
}

RateSearch rate_for_cell(const ExperimentConfig& cfg, int n, const WeightSpec& member) {
  const auto constants = class_constants(cfg.weights.family,
                                         family_domain(cfg.weights.family, n, cfg.weights.exp_upper), {n, n});
  return rate_with_constants(cfg, n, member, constants);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, RunOptions options) {
  cfg.validate();
  struct Cell {
    int n;
    std::size_t param_index;
    WeightSpec member;
    RateFunction rate;
  };
  ExperimentResult result;
  result.config = cfg;
  std::vector<Cell> cells;
  for (int n : cfg.n_grid) {
    const auto constants = class_constants(cfg.weights.family,
                                           family_domain(cfg.weights.family, n, cfg.weights.exp_upper), {n, n});
    const auto members = cfg.weights.members(n);
    for (std::size_t k = 0; k < members.size(); ++k) {
      RateSearch search = rate_with_constants(cfg, n, members[k], constants);
      result.rates.push_back({n, members[k].param, search.A, search.doublings, search.report.min_slack});
      cells.push_back({n, k, members[k], std::move(search.rate)});
    }
  }

  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<ResultRow> rows(cells.size() * reps);
  const double log_delta = std::log(1.0 / cfg.delta);

  auto evaluate = [&](std::size_t task) {
    const Cell& cell = cells[task / reps];
    const int rep = static_cast<int>(task % reps);
    ResultRow& row = rows[task];
    row.n = cell.n;
    row.param = cell.member.param;
    row.param_index = cell.param_index;
    row.replication = rep;
    row.seed = derive_seed(cfg.base_seed, {std::uint64_t(cell.n), cell.param_index, std::uint64_t(rep)});
    try {
      const ProcessSpec spec = cfg.process.with_n(cell.n);
      const WeightVector w = make_weights(cell.member);
      row.w_l2 = w.l2();
      const SamplePath path = simulate(spec, row.seed);
      const HypothesisClassSpec cls = cfg.cls.for_weights(spec, w.l2());
      const FittedHypothesis fit = fit_weighted_erm(path, w, cls, derive_seed(row.seed, {1}), cfg.net);
      const McOptions mc{cfg.mc_draws, derive_seed(row.seed, {2})};
      row.learning_error = learning_error(fit, spec, w, mc).value;
      row.drift_error = drift_error(spec, w, cell.n);
      row.excess_risk = excess_risk(fit, spec, cell.n, mc).value;
      const double r = cell.rate(w.l2());
      row.rate_term = r * r * log_delta * log_delta;
      row.certificate = row.rate_term + row.drift_error;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      row.learning_error = row.drift_error = row.excess_risk = std::nan("");
      row.rate_term = row.certificate = std::nan("");
    }
  };

  const std::size_t jobs = std::max<std::size_t>(
      1, options.jobs > 0 ? std::size_t(options.jobs) : std::size_t(std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < rows.size(); task = next++) evaluate(task);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < std::min(jobs, rows.size()); ++i) pool.emplace_back(worker);
  }

  flag_outliers(rows);
  result.rows = std::move(rows);
  json failures = json::array();
  for (const auto& row : result.rows) {
    if (row.ok) continue;
    ++result.failed_rows;
    failures.push_back({{"n", row.n}, {"param", row.param}, {"replication", row.replication},
                        {"error", row.error}});
  }
  if (result.failed_rows * 100 > static_cast<int>(result.rows.size()))
    throw std::runtime_error(std::to_string(result.failed_rows) + " of " +
                             std::to_string(result.rows.size()) + " rows failed; first: " +
                             failures.front().at("error").get<std::string>());

  if (cfg.slope) {
    try {
      result.slope = fit_slope(result.rows, cfg.slope->x_field, cfg.slope->y_field, cfg.slope->min_points);
      result.pass = std::abs(result.slope->slope - cfg.slope->target) <= cfg.slope->tolerance &&
                    result.slope->r2 >= cfg.slope->min_r2;
    } catch (const std::domain_error&) {
      result.slope.reset();
    }
  }

  json rates = json::array();
  for (const auto& r : result.rates)
    rates.push_back({{"n", r.n}, {"param", r.param}, {"A", r.A}, {"min_slack", r.min_slack}});
  const std::string canonical = canonical_config(cfg);
  result.manifest = {{"name", cfg.name},
                     {"config", json::parse(canonical)},
                     {"config_sha256", sha256_hex(canonical)},
                     {"base_seed", cfg.base_seed},
                     {"version", DRIFTERM_VERSION},
                     {"rows", result.rows.size()},
                     {"failed_rows", result.failed_rows},
                     {"failures", failures},
                     {"rates", rates}};
  if (result.slope) {
    result.manifest["slope"] = {{"x_field", cfg.slope->x_field},
                                {"y_field", cfg.slope->y_field},
                                {"slope", result.slope->slope},
                                {"std_error", result.slope->std_error},
                                {"r2", result.slope->r2},
                                {"points", result.slope->points},
                                {"target", cfg.slope->target},
                                {"tolerance", cfg.slope->tolerance},
                                {"pass", *result.pass}};
  } else {
    result.manifest["slope"] = nullptr;
  }
  if (!cfg.out_dir.empty()) write_outputs(result, cfg.out_dir);
  return result;
}

SlopeFit fit_slope(const std::vector<ResultRow>& rows, std::string_view x_field,
                   std::string_view y_field, int min_points) {
  std::map<double, std::pair<double, int>> groups;
  for (const auto& row : rows) {
    if (!row.ok) continue;
    auto& g = groups[row.field(x_field)];
    g.first += row.field(y_field);
    ++g.second;
  }
  if (static_cast<int>(groups.size()) < min_points)
    throw std::domain_error("slope needs at least " + std::to_string(min_points) + " distinct x values");
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [x, g] : groups) {
    const double mean = g.first / g.second;
    if (!(x > 0.0) || !(mean > 0.0)) throw std::domain_error("nonpositive value entering a log");
    lx.push_back(std::log(x));
    ly.push_back(std::log(mean));
  }
  const auto k = static_cast<Eigen::Index>(lx.size());
  const Eigen::Map<Eigen::VectorXd> x(lx.data(), k);
  const Eigen::Map<Eigen::VectorXd> y(ly.data(), k);
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double sxx = xc.squaredNorm();
  SlopeFit fit;
  fit.points = static_cast<int>(k);
  fit.slope = xc.dot(yc) / sxx;
  const double ssr = (yc - fit.slope * xc).squaredNorm();
  const double sst = yc.squaredNorm();
  fit.r2 = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  fit.std_error = k > 2 ? std::sqrt(ssr / double(k - 2) / sxx) : std::nan("");
  return fit;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::domain_error("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = q * double(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - double(lo)) * (values[hi] - values[lo]);
}

double calibrate_ccal(const std::vector<ResultRow>& rows) {
  std::vector<double> ratios;
  for (const auto& row : rows) {
    if (!row.ok) continue;
    if (!(row.rate_term != 0.0)) throw std::domain_error("zero rate term in calibration data");
    ratios.push_back(row.excess_risk / row.rate_term);
  }
  return quantile(std::move(ratios), 0.99);
}

void flag_outliers(std::vector<ResultRow>& rows) {
  std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].ok) groups[{rows[i].n, rows[i].param_index}].push_back(i);
  for (const auto& [key, idx] : groups) {
    std::vector<double> v;
    for (auto i : idx) v.push_back(rows[i].learning_error);
    const double q1 = quantile(v, 0.25);
    const double q3 = quantile(v, 0.75);
    const double iqr = q3 - q1;
    for (auto i : idx)
      rows[i].outlier = rows[i].learning_error < q1 - 6.0 * iqr || rows[i].learning_error > q3 + 6.0 * iqr;
  }
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.param) << ',' << format_double(r.w_l2) << ',' << r.seed << ','
        << format_double(r.learning_error) << ',' << format_double(r.drift_error) << ','
        << format_double(r.excess_risk) << ',' << format_double(r.rate_term) << ','
        << format_double(r.certificate) << ',' << (r.ok ? "ok" : "failed") << ',' << (r.outlier ? 1 : 0)
        << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("unexpected results header: " + line);
  std::vector<ResultRow> rows;
  std::map<std::pair<int, double>, std::size_t> param_index;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 11) throw std::runtime_error("malformed results row: " + line);
    ResultRow r;
    r.n = std::stoi(cells[0]);
    r.param = std::stod(cells[1]);
    r.w_l2 = std::stod(cells[2]);
    r.seed = std::stoull(cells[3]);
    r.learning_error = std::stod(cells[4]);
    r.drift_error = std::stod(cells[5]);
    r.excess_risk = std::stod(cells[6]);
    r.rate_term = std::stod(cells[7]);
    r.certificate = std::stod(cells[8]);
    r.ok = cells[9] == "ok";
    r.outlier = cells[10] == "1";
    auto [it, inserted] = param_index.try_emplace({r.n, r.param}, 0);
    if (inserted) {
      std::size_t count = 0;
      for (const auto& [key, _] : param_index)
        if (key.first == r.n) ++count;
      it->second = count - 1;
    }
    r.param_index = it->second;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string canonical_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(); }

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "rows.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "rows.csv").string());
    write_csv(csv, result.rows);
  }
  std::ofstream manifest(dir / "manifest.json", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  manifest << result.manifest.dump(2) << '\n';
}

}  // namespace drifterm
