#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drifterm/hypotheses.hpp"
#include "drifterm/io.hpp"
#include "drifterm/processes.hpp"
#include "drifterm/rates.hpp"
#include "drifterm/weights.hpp"

namespace drifterm {

/// Members of one weight family evaluated at t = n for each n of the grid.
/// Exactly one of `params`, `n_eff` (exponential only) or `full` (uniform
/// window s = n) selects the members.
struct WeightGrid {
  WeightFamily family = WeightFamily::UniformWindow;
  std::vector<double> params;
  std::vector<double> n_eff;
  bool full = false;
  double exp_upper = kDefaultExpUpper;

  std::size_t size() const;
  std::vector<WeightSpec> members(int n) const;
};

enum class ClassSizing { Fixed, BasisSize, NetWidth };

std::string_view to_string(ClassSizing sizing);
ClassSizing parse_class_sizing(std::string_view name);

/// Hypothesis class chosen per weight vector: fixed, q = basis_size(||w||)
/// for step bases, or width = relu_width_for(||w||) for networks.
struct ClassPolicy {
  HypothesisKind kind = HypothesisKind::LinearBall;
  double bound = 1.0;
  ClassSizing sizing = ClassSizing::Fixed;
  int q = 1;
  int width = 8;
  int layers = 1;
  double param_bound = 1.0;
  double sizing_const = 1.0;

  HypothesisClassSpec for_weights(const ProcessSpec& spec, double w_l2) const;
};

struct SlopeSpec {
  std::string x_field = "n";
  std::string y_field = "learning_error";
  double target = -1.0;
  double tolerance = 0.15;
  double min_r2 = 0.0;
  int min_points = 5;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ProcessSpec process;
  WeightGrid weights;
  ClassPolicy cls;
  std::vector<int> n_grid;
  int replications = 30;
  double delta = 0.05;
  std::uint64_t base_seed = 1;
  RateVariant rate_variant = RateVariant::PropFiveI;
  std::optional<SlopeSpec> slope;
  int mc_draws = kDefaultMcDraws;
  NetTrainingOptions net;
  std::filesystem::path out_dir;  ///< empty: no files written

  /// Throws std::domain_error on an unusable config; slope experiments also
  /// need >= 30 replications and >= 5 n values spanning >= 2 octaves.
  void validate() const;
};

ExperimentConfig experiment_config_from_json(const json& j);
json to_json(const ExperimentConfig& cfg);
/// Reads a JSON config; DRIFTERM_SEED, when set, overrides base_seed.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ResultRow {
  int n = 0;
  double param = 0.0;
  double w_l2 = 0.0;
  std::uint64_t seed = 0;
  double learning_error = 0.0;
  double drift_error = 0.0;
  double excess_risk = 0.0;
  double rate_term = 0.0;    ///< r(||w||)^2 log^2(1/delta)
  double certificate = 0.0;  ///< rate_term + drift_error
  bool ok = true;
  bool outlier = false;
  std::size_t param_index = 0;
  int replication = 0;
  std::string error;

  double n_eff() const { return 1.0 / (w_l2 * w_l2); }
  /// n, n_eff, w_l2, param, learning_error, drift_error, excess_risk, rate_term, certificate
  double field(std::string_view name) const;
};

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  double r2 = 0.0;
  int points = 0;
};

struct RateSummary {
  int n = 0;
  double param = 0.0;
  double A = 1.0;
  int doublings = 0;
  double min_slack = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  std::vector<RateSummary> rates;
  std::optional<SlopeFit> slope;
  std::optional<bool> pass;
  int failed_rows = 0;
  json manifest;
};

struct RunOptions {
  int jobs = 0;  ///< 0: hardware concurrency
};

/// Deterministic in (config, base_seed): row (n, param, rep) uses seed
/// derive_seed(base_seed, {n, param index, rep}) and rows come back in
/// (n, param, rep) order whatever the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, RunOptions options = {});

/// Rate function used for the certificates of one (n, weight member) cell.
RateSearch rate_for_cell(const ExperimentConfig& cfg, int n, const WeightSpec& member);

/// OLS of log(mean y) on log(x) over the distinct x values of ok rows.
SlopeFit fit_slope(const std::vector<ResultRow>& rows, std::string_view x_field,
                   std::string_view y_field, int min_points = 5);

/// 99th percentile (linear interpolation) of excess_risk / rate_term.
double calibrate_ccal(const std::vector<ResultRow>& rows);

/// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Flags rows beyond 6 IQR of their (n, param) group in learning error.
void flag_outliers(std::vector<ResultRow>& rows);

inline constexpr const char* kCsvHeader =
    "n,param,w_l2,seed,learning_error,drift_error,excess_risk,rate_term,certificate,status,outlier";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);
/// Compact JSON with sorted keys.
std::string canonical_config(const ExperimentConfig& cfg);

/// Writes rows.csv and manifest.json into dir.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace drifterm
