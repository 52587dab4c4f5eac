#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qfluid/error.hpp"
#include "qfluid/experiment.hpp"
#include "qfluid/fluid.hpp"

namespace qfluid {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kHorizonDelays = 100.0;
constexpr double kHorizonRadians = 2000.0;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}

double as_double(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    invalid("config: '" + key + "' must be a number");
  }
}

HistoryComponent parse_history_component(const YAML::Node& node) {
  if (node.IsScalar()) return HistoryComponent::constant(as_double(node, "history"));
  if (node.IsMap() && node["times"] && node["values"]) {
    try {
      return HistoryComponent::tabulated(node["times"].as<std::vector<double>>(),
                                         node["values"].as<std::vector<double>>());
    } catch (const YAML::Exception&) {
      invalid("config: history tables need numeric 'times' and 'values' lists");
    }
  }
  invalid("config: each history entry is a number or {times: [...], values: [...]}");
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json params_json(ModelKind kind, const ModelParams& p) {
  Json j;
  j["model"] = to_string(kind);
  j["lambda"] = p.lambda;
  j["mu"] = p.mu;
  j["alpha"] = p.alpha;
  j["epsilon"] = p.epsilon;
  j["gamma"] = p.gamma;
  j["delta"] = p.delta;
  return j;
}

Json report_object(const StabilityReport& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["omega_cr"] = number(r.omega_cr);
  j["delta_cr"] = number(r.delta_cr);
  j["gamma_resonant"] = number(r.gamma_resonant);
  j["resonant"] = r.resonant;
  j["delta1_threshold"] = number(r.delta1_threshold);
  j["delta_mod"] = number(r.delta_mod);
  j["delta_mod_at_resonance"] = number(r.delta_mod_at_resonance);
  j["threshold_rule"] = to_string(r.threshold_rule);
  j["delta_mod_alternative"] = number(r.delta_mod_alternative);
  j["sign_conflict"] = r.sign_conflict;
  j["detuning"] = number(r.detuning);
  j["coefficients"] = {{"a0", number(r.coefficients.a0)},
                       {"a1", number(r.coefficients.a1)},
                       {"a2", number(r.coefficients.a2)}};
  j["verdict"] = to_string(r.verdict);
  return j;
}

Json classification_object(const Classification& c) {
  Json j;
  j["verdict"] = to_string(c.verdict);
  j["envelope_ratio"] = number(c.envelope_ratio);
  j["extrema_count"] = c.extrema_count;
  j["final_amplitude"] = number(c.final_amplitude);
  return j;
}

void append_number(std::string& out, double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  out.append(buf.data(), res.ptr);
}

}  // namespace

void ScenarioConfig::validate() const {
  params.validate();
  history.validate(params.delta);
  integration().validate();
  if (!(classifier.burn_in >= 0.0 && classifier.burn_in < 1.0)) {
    invalid("burn_in must lie in [0, 1)");
  }
  if (!(classifier.converging_below > 0.0 &&
        classifier.converging_below <= classifier.oscillating_above)) {
    invalid("need 0 < converging_below <= oscillating_above");
  }
}

IntegrationConfig ScenarioConfig::integration() const {
  return {steps_per_delay, t_end > 0.0 ? t_end : default_horizon(kind, params)};
}

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    invalid(std::string("config: ") + e.what());
  }
  if (!root.IsMap()) invalid("config: expected a key-value document");

  static const std::set<std::string> known = {
      "name",   "model",   "lambda",          "mu",       "alpha",
      "epsilon", "gamma",  "delta",           "history",  "steps_per_delay",
      "t_end",  "burn_in", "converging_below", "oscillating_above", "threshold_sign",
      "csv",    "json"};
  for (const auto& item : root) {
    const auto key = item.first.as<std::string>();
    if (!known.contains(key)) invalid("config: unknown key '" + key + "'");
  }
  for (const char* required : {"model", "lambda", "mu", "delta", "history"}) {
    if (!root[required]) invalid(std::string("config: missing '") + required + "'");
  }

  ScenarioConfig cfg;
  cfg.name = root["name"] ? root["name"].as<std::string>() : std::string("scenario");
  cfg.kind = parse_model_kind(root["model"].as<std::string>());
  auto get = [&](const char* key, double fallback) {
    return root[key] ? as_double(root[key], key) : fallback;
  };
  cfg.params.lambda = get("lambda", 0.0);
  cfg.params.mu = get("mu", 0.0);
  cfg.params.alpha = get("alpha", 0.0);
  cfg.params.epsilon = get("epsilon", 0.0);
  cfg.params.gamma = get("gamma", 0.0);
  cfg.params.delta = get("delta", 0.0);

  const YAML::Node history = root["history"];
  if (!history.IsSequence() || history.size() != 2) {
    invalid("config: 'history' must list exactly two queue histories");
  }
  cfg.history = HistoryFunction(parse_history_component(history[0]),
                                parse_history_component(history[1]));

  if (root["steps_per_delay"]) {
    const double n = as_double(root["steps_per_delay"], "steps_per_delay");
    if (n != std::floor(n) || n < 1 || n > 1e7) invalid("config: steps_per_delay must be an integer");
    cfg.steps_per_delay = static_cast<int>(n);
  }
  if (root["t_end"] && !(root["t_end"].IsScalar() && root["t_end"].Scalar() == "auto")) {
    cfg.t_end = as_double(root["t_end"], "t_end");
    if (!(cfg.t_end > 0.0)) invalid("config: t_end must be > 0 or 'auto'");
  }
  cfg.classifier.burn_in = get("burn_in", cfg.classifier.burn_in);
  cfg.classifier.converging_below = get("converging_below", cfg.classifier.converging_below);
  cfg.classifier.oscillating_above = get("oscillating_above", cfg.classifier.oscillating_above);

  if (root["threshold_sign"]) {
    const auto rule = root["threshold_sign"].as<std::string>();
    if (rule == "integration_validated") {
      cfg.threshold_rule = ThresholdSign::IntegrationValidated;
    } else if (rule == "routh_hurwitz") {
      cfg.threshold_rule = ThresholdSign::RouthHurwitz;
    } else if (rule == "tongue_conditions") {
      cfg.threshold_rule = ThresholdSign::TongueConditions;
    } else {
      invalid("config: unknown threshold_sign '" + rule + "'");
    }
  }
  auto resolve = [&](const char* key) -> std::filesystem::path {
    if (!root[key]) return {};
    std::filesystem::path p = root[key].as<std::string>();
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  cfg.csv_path = resolve("csv");
  cfg.json_path = resolve("json");

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.parent_path());
}

std::optional<double> critical_frequency(ModelKind kind, const ModelParams& p) {
  try {
    if (kind == ModelKind::ConstantDelay) {
      if (!(p.lambda > 2.0 * p.mu)) return std::nullopt;
      return omega_cr_constant(p.lambda, p.mu);
    }
    return omega_ma(p.lambda, p.mu, delta_cr_ma(p.lambda, p.mu));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Domain) return std::nullopt;
    throw;
  }
}

double default_horizon(ModelKind kind, const ModelParams& p) {
  double horizon = kHorizonDelays * p.delta;
  if (const auto w = critical_frequency(kind, p); w && *w > 0.0) {
    horizon = std::max(horizon, kHorizonRadians / *w);
  }
  return horizon;
}

ClassifierOptions classifier_for(const ScenarioConfig& cfg) {
  ClassifierOptions options = cfg.classifier;
  const auto w = critical_frequency(cfg.kind, cfg.params);
  options.period = w && *w > 0.0 ? 2.0 * std::numbers::pi / *w : 0.0;
  options.amplitude_scale = cfg.params.lambda / (2.0 * cfg.params.mu);
  return options;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioResult result;
  result.trajectory = integrate(cfg.kind, cfg.params, cfg.history, cfg.integration());
  auto options = classifier_for(cfg);
  const double window = (1.0 - options.burn_in) * result.trajectory.t_end();
  const bool too_short = options.period > 0.0 && window < options.min_periods * options.period;
  // Short plotting runs still get envelope statistics, but no verdict.
  if (too_short) options.period = 0.0;
  result.classification = classify_trajectory(result.trajectory, options);
  if (too_short) result.classification.verdict = Dynamics::Indeterminate;
  if (critical_frequency(cfg.kind, cfg.params)) {
    result.report = stability_report(cfg.kind, cfg.params, cfg.threshold_rule);
  }
  return result;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  static constexpr std::array<const char*, 4> names = {"q1", "q2", "m1", "m2"};
  std::string line = "t";
  for (std::size_t i = 0; i < traj.dimension() && i < names.size(); ++i) {
    line += ',';
    line += names[i];
  }
  os << line << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    line.clear();
    append_number(line, traj.time(k));
    for (double v : traj.state(k)) {
      line += ',';
      append_number(line, v);
    }
    os << line << '\n';
  }
}

std::string stability_report_json(const StabilityReport& report) {
  Json j;
  j["params"] = params_json(report.kind, report.params);
  j["stability"] = report_object(report);
  return j.dump(2);
}

std::string scenario_json(const ScenarioConfig& cfg, const ScenarioResult& result) {
  Json j;
  j["name"] = cfg.name;
  j["params"] = params_json(cfg.kind, cfg.params);
  j["integration"] = {{"steps_per_delay", cfg.steps_per_delay},
                      {"dt", result.trajectory.dt()},
                      {"t_end", result.trajectory.t_end()}};
  j["stability"] = result.report ? report_object(*result.report) : Json(nullptr);
  j["classification"] = classification_object(result.classification);
  return j.dump(2);
}

void write_outputs(const ScenarioConfig& cfg, const ScenarioResult& result) {
  auto open = [](const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    return out;
  };
  if (!cfg.csv_path.empty()) {
    auto out = open(cfg.csv_path);
    write_trajectory_csv(out, result.trajectory);
    if (!out) throw Error(ErrorKind::Io, "write failed: " + cfg.csv_path.string());
  }
  if (!cfg.json_path.empty()) {
    auto out = open(cfg.json_path);
    out << scenario_json(cfg, result) << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed: " + cfg.json_path.string());
  }
}

std::string scan_json(const ScenarioConfig& cfg, const ScanResult& result) {
  Json j;
  j["name"] = cfg.name;
  j["params"] = params_json(cfg.kind, cfg.params);
  j["threshold"] = result.threshold;
  j["bracket"] = {result.lo, result.hi};
  Json probes = Json::array();
  for (const auto& probe : result.probes) {
    Json p;
    p["delta"] = probe.delta;
    p["horizon"] = probe.horizon;
    p["classification"] = classification_object(probe.classification);
    p["resolved_by_ratio"] = probe.resolved_by_ratio;
    probes.push_back(std::move(p));
  }
  j["probes"] = std::move(probes);
  if (critical_frequency(cfg.kind, cfg.params)) {
    const auto report = stability_report(cfg.kind, cfg.params, cfg.threshold_rule);
    j["predicted"] = {{"delta_cr", report.delta_cr},
                      {"delta_mod", report.delta_mod},
                      {"delta_mod_at_resonance", report.delta_mod_at_resonance}};
  }
  return j.dump(2);
}

std::string checks_json(const ScenarioConfig& cfg, const std::vector<CheckResult>& checks) {
  Json j;
  j["name"] = cfg.name;
  Json list = Json::array();
  bool all = true;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    all = all && c.passed;
  }
  j["checks"] = std::move(list);
  j["all_passed"] = all;
  return j.dump(2);
}

}  // namespace qfluid
