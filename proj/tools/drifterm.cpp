#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drifterm/harness.hpp"
#include "drifterm/hypotheses.hpp"
#include "drifterm/io.hpp"
#include "drifterm/mixing.hpp"
#include "drifterm/processes.hpp"
#include "drifterm/rates.hpp"
#include "drifterm/risk.hpp"
#include "drifterm/weights.hpp"

using namespace drifterm;

namespace {

std::vector<double> parse_floats(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    std::size_t used = 0;
    out.push_back(std::stod(cell, &used));
    if (used != cell.size()) throw std::invalid_argument("not a number: " + cell);
  }
  return out;
}

Interval family_domain(WeightFamily family, int t) {
  switch (family) {
    case WeightFamily::UniformWindow: return {1.0, double(t)};
    case WeightFamily::ExponentialSmoothing: return {0.0, kDefaultExpUpper};
    case WeightFamily::BrownDES: return {0.0, 1.0};
  }
  return {};
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_weights(const std::string& family_name, int t, int n, double param,
                std::optional<double> net_eps) {
  WeightSpec spec{parse_weight_family(family_name), t, n, param};
  const WeightVector w = make_weights(spec);
  json out{{"spec", to_json(spec)},
           {"weights", to_json(w.entries())},
           {"l1", w.l1()},
           {"l2", w.l2()},
           {"linf", w.linf()},
           {"n_eff", w.n_eff()},
           {"spikiness", w.linf() / w.l2sq()}};
  out["class_constants"] = to_json(class_constants(spec.family, family_domain(spec.family, t), {t, t}));
  if (net_eps) {
    const auto net = build_weight_net(spec.family, family_domain(spec.family, t), t, n, *net_eps);
    std::vector<double> params;
    for (const auto& m : net) params.push_back(m.param);
    out["net"] = {{"epsilon", *net_eps},
                  {"size", net.size()},
                  {"covering_bound", covering_number_bound(spec.family, CoverSelector::SingleT, t, *net_eps)},
                  {"params", params}};
  }
  emit(out);
  return 0;
}

int cmd_mixing(const std::string& kind, const std::string& params_text, int n, double delta) {
  const auto params = parse_floats(params_text);
  json doc{{"kind", kind}};
  if (kind == "ar1") {
    if (params.empty()) throw std::invalid_argument("ar1 needs --params phi[,scale,decay]");
    doc["phi"] = params[0];
    if (params.size() > 1) doc["scale"] = params[1];
    if (params.size() > 2) doc["decay"] = params[2];
  } else if (kind == "markov") {
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(double(params.size()))));
    if (d == 0 || d * d != params.size())
      throw std::invalid_argument("markov needs --params with d*d row-major transition entries");
    std::vector<std::vector<double>> rows(d, std::vector<double>(d));
    for (std::size_t i = 0; i < d * d; ++i) rows[i / d][i % d] = params[i];
    doc["transition"] = rows;
  } else if (kind != "iid") {
    throw std::invalid_argument("unknown profile: " + kind);
  }
  const MixingProfile profile = mixing_profile_from_json(doc);
  json table = json::array();
  for (int k = 0; k <= 50; ++k) table.push_back({{"k", k}, {"beta", profile.beta(k)}, {"rho", profile.rho(k)}});
  const MBeta mb = m_beta(profile, n, delta);
  json out{{"profile", doc},
           {"kind", profile.kind() == MixingKind::Exact ? "exact" : "analytic_bound"},
           {"table", table},
           {"n", n},
           {"delta", delta},
           {"m_beta", mb.found ? json(mb.m) : json(nullptr)},
           {"k_rho", profile.k_rho() ? json(*profile.k_rho()) : json(nullptr)}};
  emit(out);
  return 0;
}

int cmd_simulate(const std::string& spec_file, std::uint64_t seed, const std::string& out_path) {
  const ProcessSpec spec = process_spec_from_json(read_json_file(spec_file));
  const SamplePath path = simulate(spec, seed);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  write_path_csv(out, path);
  return 0;
}

int cmd_fit(const std::string& data_file, const std::string& weights_text, const std::string& class_file,
            const std::string& out_path, std::uint64_t seed) {
  const PathData data = read_path_csv(data_file);
  const WeightVector w = make_weights(weight_spec_from_json(json_from_text_or_file(weights_text)));
  const HypothesisClassSpec cls = class_spec_from_json(json_from_text_or_file(class_file));
  const FittedHypothesis fit = fit_weighted_erm(data.z, data.y, w.entries(), cls, seed);
  json out = to_json(fit);
  out["weights"] = to_json(w.spec());
  const std::string text = out.dump(2);
  if (out_path.empty() || out_path == "-") {
    std::cout << text << '\n';
  } else {
    std::ofstream file(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    file << text << '\n';
  }
  return 0;
}

int cmd_rates(const std::string& params_file, const std::string& variant_name, int grid_points) {
  const json doc = read_json_file(params_file);
  const RateParameters params = rate_parameters_from_json(doc);
  const RateVariant variant = parse_rate_variant(variant_name);
  const auto grid = condition_grid(params.cw, params.c1, grid_points);
  const RateSearch search = find_rate_constant(variant, params, approx_error_from_json(doc), grid);
  json table = json::array();
  for (const auto& p : search.report.points) table.push_back({{"u", p.u}, {"r", p.r}});
  json out{{"variant", to_string(variant)},
           {"A", search.A},
           {"doublings", search.doublings},
           {"constants",
            {{"c1", params.c1},
             {"cw", params.cw},
             {"bw", params.bw},
             {"m_beta", params.m_beta},
             {"k_rho", params.k_rho},
             {"c_inf", params.c_inf},
             {"alpha", params.alpha},
             {"n", params.n},
             {"delta", params.delta}}},
           {"table", table},
           {"report", to_json(search.report)}};
  emit(out);
  return 0;
}

int cmd_risk(const std::string& fit_text, const std::string& spec_file, const std::string& w_text, int t,
             bool with_discrepancy) {
  const FittedHypothesis fit = fitted_from_json(json_from_text_or_file(fit_text));
  const ProcessSpec spec = process_spec_from_json(read_json_file(spec_file));
  const WeightVector w = make_weights(weight_spec_from_json(json_from_text_or_file(w_text)));
  RiskReport report;
  report.target_time = t + 1;
  report.excess_risk = excess_risk(fit, spec, t);
  report.learning_error = learning_error(fit, spec, w);
  report.drift_error = {drift_error(spec, w, t), 0.0, DistanceMode::Exact};
  if (with_discrepancy) {
    try {
      report.discrepancy_sum = discrepancy_sum(spec, fit.cls, t + 1);
    } catch (const DiscrepancyUnavailable&) {
    }
  }
  emit(to_json(report));
  return 0;
}

int cmd_run(const std::string& config_file, int jobs, const std::string& out_dir) {
  ExperimentConfig cfg = load_experiment_config(config_file);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  const ExperimentResult result = run_experiment(cfg, {jobs});
  json summary = result.manifest;
  summary.erase("config");
  if (!cfg.out_dir.empty()) summary["out_dir"] = cfg.out_dir.string();
  emit(summary);
  return result.pass.value_or(true) ? 0 : 1;
}

int cmd_slopes(const std::string& results, const std::string& x, const std::string& y) {
  const auto rows = read_csv(results);
  const SlopeFit fit = fit_slope(rows, x, y);
  emit({{"x_field", x}, {"y_field", y}, {"slope", fit.slope}, {"std_error", fit.std_error},
        {"r2", fit.r2}, {"points", fit.points}});
  return 0;
}

int cmd_calibrate(const std::string& results) {
  const auto rows = read_csv(results);
  emit({{"c_cal", calibrate_ccal(rows)}, {"quantile", 0.99}, {"rows", rows.size()}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted ERM under drift: weights, mixing, simulation, fitting and rate certificates"};
  app.require_subcommand(1);

  std::string family;
  int t = 1;
  int n = 1;
  double param = 1.0;
  std::optional<double> net_eps;
  auto* weights = app.add_subcommand("weights", "Weight vector, norms and class constants");
  weights->add_option("--family", family, "uniform | exp | brown")->required();
  weights->add_option("--t", t, "Last observed time")->required();
  weights->add_option("--n", n, "Horizon")->required();
  weights->add_option("--param", param, "Window length or decay rate")->required();
  weights->add_option("--net-eps", net_eps, "Also build an epsilon-net of the family at t");

  std::string profile;
  std::string mixing_params;
  double delta = 0.05;
  auto* mixing = app.add_subcommand("mixing", "Mixing coefficients, m_beta and K_rho");
  mixing->add_option("--profile", profile, "markov | ar1 | iid")->required();
  mixing->add_option("--params", mixing_params, "ar1: phi[,scale,decay]; markov: row-major transition");
  mixing->add_option("--n", n, "Sample size")->required();
  mixing->add_option("--delta", delta, "Confidence budget");

  std::string spec_file;
  std::uint64_t seed = 0;
  std::string out_path;
  auto* sim = app.add_subcommand("simulate", "Simulate a process path to CSV");
  sim->add_option("--spec", spec_file, "Process spec JSON")->required();
  sim->add_option("--seed", seed, "Seed")->required();
  sim->add_option("--out", out_path, "Output CSV")->required();

  std::string data_file;
  std::string weights_json;
  std::string class_file;
  auto* fit = app.add_subcommand("fit", "Weighted ERM on a CSV path");
  fit->add_option("--data", data_file, "CSV with header t,y,z_1..z_p")->required();
  fit->add_option("--weights", weights_json, "Weight spec JSON (inline or file)")->required();
  fit->add_option("--class", class_file, "Hypothesis class JSON (inline or file)")->required();
  fit->add_option("--out", out_path, "Output JSON ('-' for stdout)");
  fit->add_option("--seed", seed, "Seed for network initialization");

  std::string params_file;
  std::string variant = "i";
  int grid = kConditionGridPoints;
  auto* rates = app.add_subcommand("rates", "Rate function, condition report and constant A");
  rates->add_option("--params", params_file, "Rate parameter JSON")->required();
  rates->add_option("--variant", variant, "i | ii")->check(CLI::IsMember({"i", "ii"}));
  rates->add_option("--grid", grid, "Interior grid points")->check(CLI::PositiveNumber);

  std::string fit_json;
  std::string w_json;
  bool with_discrepancy = false;
  auto* risk = app.add_subcommand("risk", "Excess risk decomposition of a fit");
  risk->add_option("--fit", fit_json, "Fit JSON (inline or file)")->required();
  risk->add_option("--spec", spec_file, "Process spec JSON")->required();
  risk->add_option("--w", w_json, "Weight spec JSON (inline or file)")->required();
  risk->add_option("--t", t, "Fit time; the target is t + 1")->required();
  risk->add_flag("--discrepancy", with_discrepancy, "Also report the discrepancy sum");

  std::string config_file;
  int jobs = 0;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run a replicated experiment");
  run->add_option("--config", config_file, "Experiment config JSON")->required();
  run->add_option("--jobs", jobs, "Worker threads (0: all cores)");
  run->add_option("--out", out_dir, "Directory for rows.csv and manifest.json");

  std::string results;
  std::string x_field = "n";
  std::string y_field = "learning_error";
  auto* slopes = app.add_subcommand("slopes", "Log-log slope of a results CSV");
  slopes->add_option("--results", results, "rows.csv")->required();
  slopes->add_option("--x", x_field, "n | n_eff | w_l2");
  slopes->add_option("--y", y_field, "learning_error | excess_risk | ...");

  auto* calibrate = app.add_subcommand("calibrate", "Calibration constant from a baseline results CSV");
  calibrate->add_option("--results", results, "rows.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*weights) return cmd_weights(family, t, n, param, net_eps);
    if (*mixing) return cmd_mixing(profile, mixing_params, n, delta);
    if (*sim) return cmd_simulate(spec_file, seed, out_path);
    if (*fit) return cmd_fit(data_file, weights_json, class_file, out_path, seed);
    if (*rates) return cmd_rates(params_file, variant, grid);
    if (*risk) return cmd_risk(fit_json, spec_file, w_json, t, with_discrepancy);
    if (*run) return cmd_run(config_file, jobs, out_dir);
    if (*slopes) return cmd_slopes(results, x_field, y_field);
    if (*calibrate) return cmd_calibrate(results);
  } catch (const std::exception& e) {
    std::cerr << "drifterm: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
