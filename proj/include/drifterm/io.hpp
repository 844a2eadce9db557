#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "drifterm/hypotheses.hpp"
#include "drifterm/mixing.hpp"
#include "drifterm/processes.hpp"
#include "drifterm/rates.hpp"
#include "drifterm/risk.hpp"
#include "drifterm/weights.hpp"

namespace drifterm {

using json = nlohmann::json;

json read_json_file(const std::filesystem::path& path);
/// Accepts inline JSON text or a path to a JSON file.
json json_from_text_or_file(const std::string& text_or_path);

json to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);
Eigen::MatrixXd matrix_from_json(const json& j);  ///< array of rows

json to_json(const WeightSpec& spec);
WeightSpec weight_spec_from_json(const json& j);
json to_json(const WeightClassConstants& c);

json to_json(const DriftPath& drift);
DriftPath drift_path_from_json(const json& j);
json to_json(const DependenceCore& core);
DependenceCore core_from_json(const json& j);
json to_json(const ProcessSpec& spec);
ProcessSpec process_spec_from_json(const json& j);

json to_json(const HypothesisClassSpec& cls);
HypothesisClassSpec class_spec_from_json(const json& j);
json to_json(const FittedHypothesis& fit);
FittedHypothesis fitted_from_json(const json& j);

/// Mixing profile from {"kind": "iid"} | {"kind": "ar1", "phi", ["scale", "decay"]}
/// | {"kind": "markov", "transition": rows} | {"kind": "polynomial",
/// "exponent", ["scale"], ["k_rho"]} (beta(m) = scale m^{-exponent}).
MixingProfile mixing_profile_from_json(const json& j);

/// Rate parameters from a document with keys n, delta, weights, mixing,
/// class, and optional c_p, c_l, K, constants.
RateParameters rate_parameters_from_json(const json& j);
/// "none" (default) or "step_lipschitz".
ApproxErrorFn approx_error_from_json(const json& j);

/// CSV with header t,y,z_1..z_p, one row per time step.
void write_path_csv(std::ostream& out, const SamplePath& path);
struct PathData {
  Eigen::VectorXd y;
  Eigen::MatrixXd z;
};
PathData read_path_csv(const std::filesystem::path& file);

json to_json(const RiskTerm& term);
json to_json(const RiskReport& report);
json to_json(const RateConditionReport& report);

}  // namespace drifterm
