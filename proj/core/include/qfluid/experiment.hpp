#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qfluid/dde.hpp"
#include "qfluid/model.hpp"
#include "qfluid/stability.hpp"

namespace qfluid {

enum class Dynamics { Converging, Oscillating, Indeterminate };

std::string_view to_string(Dynamics d) noexcept;

struct ClassifierOptions {
  double burn_in = 0.5;             // fraction of the forward horizon skipped
  double converging_below = 0.9;    // envelope ratio
  double oscillating_above = 0.98;  // envelope ratio
  double min_periods = 20.0;        // required after burn-in when period > 0
  double period = 0.0;              // expected oscillation period, 0 = unknown
  double amplitude_scale = 1.0;     // equilibrium level for the amplitude floor
};

struct Classification {
  Dynamics verdict = Dynamics::Indeterminate;
  double envelope_ratio = 0.0;  // mean of last quartile of |d| maxima / first quartile
  std::size_t extrema_count = 0;
  double final_amplitude = 0.0;
};

/// Classifies the envelope of |d(t)| after burn-in.
Classification classify_signal(std::span<const double> times, std::span<const double> d,
                               const ClassifierOptions& options);

/// Classifies d = q1 - q2 over the forward (t >= 0) part of a trajectory.
Classification classify_trajectory(const Trajectory& traj, const ClassifierOptions& options);

struct ScenarioConfig {
  std::string name;
  ModelKind kind = ModelKind::ConstantDelay;
  ModelParams params;
  HistoryFunction history = HistoryFunction::constant(0.0, 0.0);
  int steps_per_delay = 128;
  double t_end = 0.0;  // 0 selects default_horizon()
  ClassifierOptions classifier;
  ThresholdSign threshold_rule = ThresholdSign::IntegrationValidated;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;

  void validate() const;
  IntegrationConfig integration() const;
};

/// Parses the YAML key-value scenario format; relative output paths are
/// resolved against `base_dir`.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Hopf frequency of the symmetric equilibrium for these rates, if any.
std::optional<double> critical_frequency(ModelKind kind, const ModelParams& p);

/// max(100 delta, 2000 / omega_cr) (100 delta without an oscillatory regime).
double default_horizon(ModelKind kind, const ModelParams& p);

/// Classifier options with the period and amplitude scale filled in.
ClassifierOptions classifier_for(const ScenarioConfig& cfg);

struct ScenarioResult {
  Trajectory trajectory;
  std::optional<StabilityReport> report;  // empty when no oscillatory regime
  Classification classification;
};

/// Integrates and classifies. A horizon too short for the classifier's
/// minimum window yields an Indeterminate verdict instead of an error.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Writes the CSV and JSON outputs named in the config (if any).
void write_outputs(const ScenarioConfig& cfg, const ScenarioResult& result);

/// Header t,q1,q2[,m1,m2]; every node including the history segment;
/// shortest round-trip number formatting.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

std::string stability_report_json(const StabilityReport& report);
std::string scenario_json(const ScenarioConfig& cfg, const ScenarioResult& result);

struct ScanOptions {
  double tolerance = 1e-3;  // final bracket width
  int max_extensions = 3;   // horizon doublings for an indeterminate probe
};

struct ScanProbe {
  double delta = 0.0;
  double horizon = 0.0;
  Classification classification;
  bool resolved_by_ratio = false;  // still indeterminate; ratio < 1 taken as converging
};

struct ScanResult {
  double threshold = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<ScanProbe> probes;
};

/// Bisects on delta between a converging `lo` and an oscillating `hi`,
/// re-integrating at every probe. Error(Bracket) if the ends do not straddle.
ScanResult empirical_threshold_scan(const ScenarioConfig& base, double lo, double hi,
                                    const ScanOptions& options = {});

std::string scan_json(const ScenarioConfig& cfg, const ScanResult& result);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the model invariants (choice-fraction normalization, symmetry,
/// determinism, total-mass law, moving-average quadrature, report
/// consistency) on the configured scenario.
std::vector<CheckResult> run_checks(const ScenarioConfig& cfg);

std::string checks_json(const ScenarioConfig& cfg, const std::vector<CheckResult>& checks);

}  // namespace qfluid
