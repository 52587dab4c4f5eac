#include <cmath>
#include <future>
#include <sstream>

#include "qfluid/error.hpp"
#include "qfluid/experiment.hpp"

namespace qfluid {

namespace {

ScanProbe run_probe(const ScenarioConfig& base, double delta, const ScanOptions& options) {
  ScenarioConfig cfg = base;
  cfg.params.delta = delta;
  ScanProbe probe;
  probe.delta = delta;
  probe.horizon = base.t_end > 0.0 ? base.t_end : default_horizon(cfg.kind, cfg.params);
  for (int extension = 0;; ++extension) {
    cfg.t_end = probe.horizon;
    const Trajectory traj = integrate(cfg.kind, cfg.params, cfg.history, cfg.integration());
    probe.classification = classify_trajectory(traj, classifier_for(cfg));
    if (probe.classification.verdict != Dynamics::Indeterminate) break;
    if (extension == options.max_extensions) {
      probe.resolved_by_ratio = true;
      break;
    }
    probe.horizon *= 2.0;
  }
  return probe;
}

bool on_converging_side(const ScanProbe& probe) {
  if (probe.resolved_by_ratio) return probe.classification.envelope_ratio < 1.0;
  return probe.classification.verdict == Dynamics::Converging;
}

}  // namespace

ScanResult empirical_threshold_scan(const ScenarioConfig& base, double lo, double hi,
                                    const ScanOptions& options) {
  if (!(lo > 0.0 && hi > lo && std::isfinite(hi))) {
    throw Error(ErrorKind::InvalidArgument, "scan: need 0 < lo < hi");
  }
  if (!(options.tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "scan: tolerance must be > 0");

  // The two endpoint integrations are independent.
  auto lo_future = std::async(std::launch::async, run_probe, std::cref(base), lo, std::cref(options));
  ScanProbe hi_probe = run_probe(base, hi, options);
  ScanProbe lo_probe = lo_future.get();

  ScanResult result;
  result.probes = {lo_probe, hi_probe};
  if (lo_probe.classification.verdict != Dynamics::Converging ||
      hi_probe.classification.verdict != Dynamics::Oscillating) {
    std::ostringstream os;
    os << "scan: bracket does not straddle a transition (delta " << lo << " is "
       << to_string(lo_probe.classification.verdict) << ", delta " << hi << " is "
       << to_string(hi_probe.classification.verdict) << ")";
    throw Error(ErrorKind::Bracket, os.str());
  }

  while (hi - lo >= options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    ScanProbe probe = run_probe(base, mid, options);
    (on_converging_side(probe) ? lo : hi) = mid;
    result.probes.push_back(std::move(probe));
  }
  result.lo = lo;
  result.hi = hi;
  result.threshold = 0.5 * (lo + hi);
  return result;
}

}  // namespace qfluid
