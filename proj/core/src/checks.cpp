#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qfluid/error.hpp"
#include "qfluid/experiment.hpp"
#include "qfluid/fluid.hpp"

namespace qfluid {

namespace {

std::string describe(const char* label, double value, const char* bound_label, double bound) {
  std::ostringstream os;
  os.precision(6);
  os << label << " = " << value << " (" << bound_label << " " << bound << ")";
  return os.str();
}

CheckResult check_choice_sum() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> mag(-6.0, 6.0);
  std::uniform_int_distribution<int> sign(0, 1);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double a = (sign(rng) ? 1 : -1) * std::pow(10.0, mag(rng));
    const double b = (sign(rng) ? 1 : -1) * std::pow(10.0, mag(rng));
    const auto [p1, p2] = choice_fraction(a, b);
    worst = std::max(worst, std::abs(p1 + p2 - 1.0));
  }
  const double bound = 4.0 * std::numeric_limits<double>::epsilon();
  return {"choice_fraction_sum", worst <= bound, describe("max |p1 + p2 - 1|", worst, "<=", bound)};
}

CheckResult check_symmetry(const ScenarioConfig& cfg) {
  const double level = cfg.history[0].value(0.0);
  const auto traj = integrate(cfg.kind, cfg.params, HistoryFunction::constant(level, level),
                              cfg.integration());
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto y = traj.state(k);
    worst = std::max(worst, std::abs(y[0] - y[1]));
  }
  return {"symmetry", worst < 1e-12, describe("max |q1 - q2|", worst, "<", 1e-12)};
}

CheckResult check_determinism(const ScenarioConfig& cfg, const Trajectory& first) {
  const auto second = integrate(cfg.kind, cfg.params, cfg.history, cfg.integration());
  bool same = first.size() == second.size();
  for (std::size_t k = 0; same && k < first.size(); ++k) {
    same = std::equal(first.state(k).begin(), first.state(k).end(), second.state(k).begin());
  }
  return {"determinism", same, same ? "bit-identical" : "trajectories differ"};
}

CheckResult check_total_mass(const ScenarioConfig& cfg, const Trajectory& traj) {
  const auto rates = RateFunction::from_params(cfg.params);
  const double q0 = cfg.history[0].value(0.0) + cfg.history[1].value(0.0);
  const std::size_t last = traj.size() - 1;
  const double expected = mean_infinite_server(traj.time(last), q0, rates);
  const auto y = traj.state(last);
  const double rel = std::abs(y[0] + y[1] - expected) / std::abs(expected);
  if (cfg.steps_per_delay < 64) {
    return {"total_mass", true, "skipped: steps_per_delay < 64"};
  }
  return {"total_mass", rel < 1e-6, describe("relative error at t_end", rel, "<", 1e-6)};
}

// m_i(t) against (1/delta) * trapezoid of q_i over the dense output.
CheckResult check_moving_average(const ScenarioConfig& cfg, const Trajectory& traj) {
  const double delta = cfg.params.delta;
  const double t_end = traj.t_end();
  if (t_end < delta) return {"moving_average_quadrature", true, "skipped: horizon < delta"};
  constexpr int kSubsteps = 8;
  const int pieces = cfg.steps_per_delay * kSubsteps;
  const double h = delta / pieces;
  double worst = 0.0;
  std::vector<double> y(traj.dimension());
  for (int probe = 0; probe <= 20; ++probe) {
    const double t = delta + (t_end - delta) * probe / 20.0;
    std::array<double, 2> sum{};
    for (int j = 0; j <= pieces; ++j) {
      traj.sample_into(t - delta + j * h, y);
      const double w = (j == 0 || j == pieces) ? 0.5 : 1.0;
      sum[0] += w * y[0];
      sum[1] += w * y[1];
    }
    traj.sample_into(t, y);
    for (int i = 0; i < 2; ++i) {
      const double quad = sum[i] * h / delta;
      worst = std::max(worst, std::abs(y[2 + i] - quad) / std::abs(quad));
    }
  }
  return {"moving_average_quadrature", worst < 1e-4, describe("max relative gap", worst, "<", 1e-4)};
}

CheckResult check_report(const ScenarioConfig& cfg) {
  if (!critical_frequency(cfg.kind, cfg.params)) {
    return {"report_consistency", true, "skipped: no oscillatory regime"};
  }
  const auto report = stability_report(cfg.kind, cfg.params, cfg.threshold_rule);
  double direct = 0.0;
  if (!report.resonant) {
    direct = report.delta_cr;
  } else if (cfg.kind == ModelKind::ConstantDelay) {
    direct = delta_mod_constant(cfg.params.lambda, cfg.params.mu, cfg.params.alpha, cfg.params.epsilon);
  } else {
    direct = delta_mod_ma(cfg.params.lambda, cfg.params.mu, cfg.params.alpha, cfg.params.epsilon,
                          cfg.threshold_rule);
  }
  const bool ok = report.delta_mod == direct &&
                  report.delta_mod == report.delta_cr + cfg.params.epsilon * report.delta1_threshold;
  return {"report_consistency", ok, describe("delta_mod", report.delta_mod, "direct", direct)};
}

}  // namespace

std::vector<CheckResult> run_checks(const ScenarioConfig& cfg) {
  cfg.validate();
  std::vector<CheckResult> out;
  out.push_back(check_choice_sum());
  const auto traj = integrate(cfg.kind, cfg.params, cfg.history, cfg.integration());
  out.push_back(check_symmetry(cfg));
  out.push_back(check_determinism(cfg, traj));
  out.push_back(check_total_mass(cfg, traj));
  if (cfg.kind == ModelKind::MovingAverage) out.push_back(check_moving_average(cfg, traj));
  out.push_back(check_report(cfg));
  return out;
}

}  // namespace qfluid
