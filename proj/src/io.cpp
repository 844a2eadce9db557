#include "drifterm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drifterm {

namespace {

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

json term_or_null(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

json json_from_text_or_file(const std::string& text_or_path) {
  const auto first = text_or_path.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text_or_path[first] == '{' || text_or_path[first] == '['))
    return json::parse(text_or_path);
  return read_json_file(text_or_path);
}

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& j) {
  if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw std::invalid_argument("ragged matrix");
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

json to_json(const WeightSpec& spec) {
  return {{"family", to_string(spec.family)}, {"t", spec.t}, {"n", spec.n}, {"param", spec.param}};
}

WeightSpec weight_spec_from_json(const json& j) {
  WeightSpec spec;
  spec.family = parse_weight_family(j.at("family").get<std::string>());
  spec.t = j.at("t").get<int>();
  spec.n = value_or(j, "n", spec.t);
  spec.param = j.at("param").get<double>();
  spec.validate();
  return spec;
}

json to_json(const WeightClassConstants& c) {
  return {{"c1", c.c1}, {"cw", c.cw}, {"bw", c.bw}, {"n_eff_max", c.n_eff_max},
          {"exact", c.exact}, {"grid_points", c.grid_points}};
}

json to_json(const DriftPath& drift) {
  json j{{"shape", to_string(drift.shape)}, {"start", to_json(drift.start)}};
  if (drift.shape != DriftPath::Shape::Constant) j["end"] = to_json(drift.end);
  if (drift.shape == DriftPath::Shape::Switch) j["switch_time"] = drift.switch_time;
  if (drift.shape == DriftPath::Shape::Sinusoidal) j["period"] = drift.period;
  return j;
}

DriftPath drift_path_from_json(const json& j) {
  DriftPath drift;
  drift.shape = parse_drift_shape(value_or<std::string>(j, "shape", "constant"));
  drift.start = vector_from_json(j.at("start"));
  if (j.contains("end")) drift.end = vector_from_json(j.at("end"));
  drift.switch_time = value_or(j, "switch_time", 0);
  drift.period = value_or(j, "period", 0.0);
  return drift;
}

json to_json(const DependenceCore& core) {
  json j{{"kind", to_string(core.kind)}};
  if (core.kind == DependenceCore::Kind::AR1) {
    j["phi"] = core.phi;
    j["noise_follows_core"] = core.noise_follows_core;
  }
  if (core.kind == DependenceCore::Kind::Markov2) j["flip"] = core.flip;
  return j;
}

DependenceCore core_from_json(const json& j) {
  DependenceCore core;
  core.kind = parse_core_kind(value_or<std::string>(j, "kind", "iid"));
  core.phi = value_or(j, "phi", 0.0);
  core.flip = value_or(j, "flip", 0.5);
  core.noise_follows_core = value_or(j, "noise_follows_core", false);
  return core;
}

json to_json(const ProcessSpec& spec) {
  json j{{"kind", to_string(spec.kind)},
         {"n", spec.n},
         {"p", spec.p},
         {"bound", spec.bound},
         {"drift", to_json(spec.drift)},
         {"noise_sd", spec.noise_sd},
         {"law", to_string(spec.law)},
         {"feature", to_string(spec.feature)},
         {"core", to_json(spec.core)}};
  if (spec.noise_var_end) j["noise_var_end"] = *spec.noise_var_end;
  return j;
}

ProcessSpec process_spec_from_json(const json& j) {
  ProcessSpec spec;
  spec.kind = parse_process_kind(value_or<std::string>(j, "kind", "drifting_linear"));
  spec.n = value_or(j, "n", spec.n);
  spec.p = value_or(j, "p", spec.p);
  spec.bound = j.at("bound").get<double>();
  spec.drift = drift_path_from_json(j.at("drift"));
  spec.noise_sd = value_or(j, "noise_sd", 0.0);
  if (j.contains("noise_var_end") && !j.at("noise_var_end").is_null())
    spec.noise_var_end = j.at("noise_var_end").get<double>();
  spec.law = parse_covariate_law(value_or<std::string>(j, "law", "uniform_cube"));
  spec.feature = parse_feature_map(value_or<std::string>(j, "feature", "identity"));
  if (j.contains("core")) spec.core = core_from_json(j.at("core"));
  spec.validate();
  return spec;
}

json to_json(const HypothesisClassSpec& cls) {
  json j{{"kind", to_string(cls.kind)}, {"bound", cls.bound}, {"input_dim", cls.input_dim},
         {"alpha", cls.alpha}, {"c_inf", cls.c_inf}};
  if (cls.kind == HypothesisKind::StepBasis) j["q"] = cls.q;
  if (cls.kind == HypothesisKind::ReluNet) {
    j["width"] = cls.width;
    j["layers"] = cls.layers;
    j["param_bound"] = cls.param_bound;
  }
  return j;
}

HypothesisClassSpec class_spec_from_json(const json& j) {
  const auto kind = parse_hypothesis_kind(j.at("kind").get<std::string>());
  const double bound = j.at("bound").get<double>();
  HypothesisClassSpec cls;
  switch (kind) {
    case HypothesisKind::LinearBall: {
      const int p = value_or(j, "input_dim", 1);
      const auto law = parse_covariate_law(value_or<std::string>(j, "law", "uniform_cube"));
      cls = linear_ball_class(bound, covariate_second_moment(law, p));
      break;
    }
    case HypothesisKind::StepBasis: cls = step_basis_class(bound, j.at("q").get<int>()); break;
    case HypothesisKind::ReluNet:
      cls = relu_net_class(bound, value_or(j, "input_dim", 1), j.at("width").get<int>(),
                           value_or(j, "layers", 1), value_or(j, "param_bound", 1.0));
      break;
  }
  if (j.contains("c_inf")) cls.c_inf = j.at("c_inf").get<double>();
  if (j.contains("alpha")) cls.alpha = j.at("alpha").get<double>();
  cls.validate();
  return cls;
}

json to_json(const FittedHypothesis& fit) {
  json j{{"class", to_json(fit.cls)},
         {"meta",
          {{"iterations", fit.meta.iterations},
           {"empirical_risk", fit.meta.empirical_risk},
           {"multiplier", fit.meta.multiplier},
           {"constrained", fit.meta.constrained}}}};
  if (const auto* lin = std::get_if<LinearModel>(&fit.model)) j["beta"] = to_json(lin->beta);
  if (const auto* step = std::get_if<StepModel>(&fit.model)) j["values"] = to_json(step->values);
  if (const auto* net = std::get_if<ReluNetwork>(&fit.model)) {
    json layers = json::array();
    for (std::size_t l = 0; l < net->hidden_weights.size(); ++l) {
      json rows = json::array();
      const auto& w = net->hidden_weights[l];
      for (Eigen::Index r = 0; r < w.rows(); ++r) rows.push_back(to_json(Eigen::VectorXd(w.row(r).transpose())));
      layers.push_back({{"weights", rows}, {"biases", to_json(net->hidden_biases[l])}});
    }
    j["layers"] = layers;
    j["out_weights"] = to_json(net->out_weights);
    j["out_bias"] = net->out_bias;
  }
  return j;
}

FittedHypothesis fitted_from_json(const json& j) {
  FittedHypothesis fit;
  const json& cls = j.contains("class") ? j.at("class") : j;
  fit.cls = class_spec_from_json(cls);
  switch (fit.cls.kind) {
    case HypothesisKind::LinearBall:
      fit.model = LinearModel{vector_from_json(j.at("beta"))};
      if (std::get<LinearModel>(fit.model).beta.size() != fit.cls.input_dim)
        throw std::invalid_argument("beta has the wrong dimension");
      break;
    case HypothesisKind::StepBasis:
      fit.model = StepModel{vector_from_json(j.at("values"))};
      if (std::get<StepModel>(fit.model).values.size() != fit.cls.q)
        throw std::invalid_argument("step values do not match q");
      break;
    case HypothesisKind::ReluNet: {
      ReluNetwork net;
      for (const auto& layer : j.at("layers")) {
        net.hidden_weights.push_back(matrix_from_json(layer.at("weights")));
        net.hidden_biases.push_back(vector_from_json(layer.at("biases")));
      }
      net.out_weights = vector_from_json(j.at("out_weights"));
      net.out_bias = value_or(j, "out_bias", 0.0);
      fit.model = std::move(net);
      break;
    }
  }
  if (j.contains("meta")) {
    const json& m = j.at("meta");
    fit.meta.iterations = value_or(m, "iterations", 0);
    fit.meta.empirical_risk = value_or(m, "empirical_risk", 0.0);
    fit.meta.multiplier = value_or(m, "multiplier", 0.0);
    fit.meta.constrained = value_or(m, "constrained", false);
  }
  return fit;
}

MixingProfile mixing_profile_from_json(const json& j) {
  const auto kind = value_or<std::string>(j, "kind", value_or<std::string>(j, "profile", "iid"));
  if (kind == "iid") return iid_profile();
  if (kind == "ar1") {
    std::optional<double> scale;
    std::optional<double> decay;
    if (j.contains("scale")) scale = j.at("scale").get<double>();
    if (j.contains("decay")) decay = j.at("decay").get<double>();
    return ar1_profile(j.at("phi").get<double>(), scale, decay);
  }
  if (kind == "markov") {
    std::optional<Eigen::VectorXd> init;
    if (j.contains("initial")) init = vector_from_json(j.at("initial"));
    return markov_profile(matrix_from_json(j.at("transition")), init);
  }
  if (kind == "polynomial") {
    const double a = j.at("exponent").get<double>();
    const double scale = value_or(j, "scale", 1.0);
    if (!(a > 0.0)) throw std::domain_error("polynomial mixing needs a positive exponent");
    return beta_only_profile([=](int m) {
      return m <= 0 ? 1.0 : std::min(1.0, scale * std::pow(double(m), -a));
    });
  }
  throw std::invalid_argument("unknown mixing kind: " + kind);
}

RateParameters rate_parameters_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  const double delta = value_or(j, "delta", 0.05);
  const json& wj = j.at("weights");
  const auto family = parse_weight_family(wj.at("family").get<std::string>());
  const auto selector = value_or<std::string>(wj, "selector", "single") == "union"
                            ? CoverSelector::UnionOverT
                            : CoverSelector::SingleT;
  const int t = value_or(wj, "t", n);
  const double exp_upper = value_or(wj, "exp_upper", kDefaultExpUpper);

  Interval range;
  switch (family) {
    case WeightFamily::UniformWindow: range = {1.0, double(t)}; break;
    case WeightFamily::ExponentialSmoothing: range = {0.0, exp_upper}; break;
    case WeightFamily::BrownDES: range = {0.0, 1.0}; break;
  }
  if (wj.contains("range")) {
    const auto r = wj.at("range").get<std::vector<double>>();
    if (r.size() != 2) throw std::invalid_argument("weights.range needs [lo, hi]");
    range = {r[0], r[1]};
  }
  const IntRange t_range = selector == CoverSelector::UnionOverT ? IntRange{1, t} : IntRange{t, t};
  WeightClassConstants constants;
  if (wj.contains("constants")) {
    const json& c = wj.at("constants");
    constants.c1 = c.at("c1").get<double>();
    constants.cw = c.at("cw").get<double>();
    constants.bw = c.at("bw").get<double>();
  } else {
    constants = class_constants(family, range, t_range);
  }

  const MixingProfile mixing =
      mixing_profile_from_json(j.contains("mixing") ? j.at("mixing") : json{{"kind", "iid"}});
  const HypothesisClassSpec cls = class_spec_from_json(j.at("class"));

  RateParameters params;
  params.c1 = constants.c1;
  params.cw = constants.cw;
  params.bw = constants.bw;
  const MBeta mb = m_beta(mixing, n, delta);
  if (!mb.found) throw RatePreconditionError("no block length m <= n meets (n/m) beta(m) <= delta");
  params.m_beta = mb.m;
  params.k_rho = j.contains("mixing") && j.at("mixing").contains("k_rho")
                     ? j.at("mixing").at("k_rho").get<double>()
                     : k_rho(mixing);
  params.c_inf = cls.c_inf;
  params.alpha = cls.alpha;
  params.delta = delta;
  params.n = n;
  params.c_p = value_or(j, "c_p", 1.0);
  params.c_l = value_or(j, "c_l", 1.0);
  if (j.contains("K") && !j.at("K").is_null()) params.K = j.at("K").get<double>();
  params.log_n1_w = weight_cover_log(family, selector, t, exp_upper);
  params.log_ninf_h = cover_log_for(cls, n);
  params.validate();
  return params;
}

ApproxErrorFn approx_error_from_json(const json& j) {
  const auto kind = value_or<std::string>(j, "approx", "none");
  if (kind == "none") return zero_approx_error();
  if (kind == "step_lipschitz") return step_approx_error(value_or(j, "lipschitz", 1.0));
  throw std::invalid_argument("unknown approximation model: " + kind);
}

void write_path_csv(std::ostream& out, const SamplePath& path) {
  out << "t,y";
  for (Eigen::Index j = 0; j < path.z.cols(); ++j) out << ",z_" << j + 1;
  out << '\n';
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << ',' << buf;
  };
  for (Eigen::Index i = 0; i < path.y.size(); ++i) {
    out << i + 1;
    put(path.y[i]);
    for (Eigen::Index j = 0; j < path.z.cols(); ++j) put(path.z(i, j));
    out << '\n';
  }
}

PathData read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,y", 0) != 0)
    throw std::runtime_error(file.string() + ": expected header t,y,z_1..z_p");
  const auto p = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') - 1);
  if (p < 1) throw std::runtime_error(file.string() + ": no covariate columns");
  std::vector<double> ys;
  std::vector<double> zs;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<Eigen::Index>(vals.size()) != p + 2)
      throw std::runtime_error(file.string() + ": malformed row: " + line);
    ys.push_back(vals[1]);
    zs.insert(zs.end(), vals.begin() + 2, vals.end());
  }
  PathData data;
  data.y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  data.z = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      zs.data(), static_cast<Eigen::Index>(ys.size()), p);
  return data;
}

json to_json(const RiskTerm& term) {
  return {{"value", term_or_null(term.value)}, {"std_error", term.std_error},
          {"mode", to_string(term.mode)}};
}

json to_json(const RiskReport& report) {
  json j{{"target_time", report.target_time},
         {"excess_risk", to_json(report.excess_risk)},
         {"learning_error", to_json(report.learning_error)},
         {"drift_error", to_json(report.drift_error)},
         {"decomposition_holds", report.decomposition_holds()}};
  j["discrepancy_sum"] = report.discrepancy_sum ? json(*report.discrepancy_sum) : json(nullptr);
  return j;
}

json to_json(const RateConditionReport& report) {
  json points = json::array();
  for (const auto& p : report.points) {
    points.push_back({{"u", p.u},
                      {"r", p.r},
                      {"kw", p.kw},
                      {"rhs_variance", p.rhs_variance},
                      {"rhs_approx", p.rhs_approx},
                      {"pass_variance", p.pass_variance},
                      {"pass_approx", p.pass_approx},
                      {"slack", term_or_null(p.slack)}});
  }
  return {{"points", points},
          {"lipschitz", report.lipschitz},
          {"lipschitz_budget", report.lipschitz_budget},
          {"increasing", report.increasing},
          {"min_slack", term_or_null(report.min_slack)},
          {"pass", report.pass}};
}

}  // namespace drifterm
