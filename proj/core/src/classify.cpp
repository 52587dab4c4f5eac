#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "qfluid/error.hpp"
#include "qfluid/experiment.hpp"

namespace qfluid {

std::string_view to_string(Dynamics d) noexcept {
  switch (d) {
    case Dynamics::Converging:
      return "converging";
    case Dynamics::Oscillating:
      return "oscillating";
    case Dynamics::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

Classification classify_signal(std::span<const double> times, std::span<const double> d,
                               const ClassifierOptions& options) {
  if (times.size() != d.size() || times.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "classify: need >= 3 samples of matching length");
  }
  if (!(options.burn_in >= 0.0 && options.burn_in < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "classify: burn_in must lie in [0, 1)");
  }
  const double start = times.front() + options.burn_in * (times.back() - times.front());
  if (options.period > 0.0 && times.back() - start < options.min_periods * options.period) {
    std::ostringstream os;
    os << "classify: trajectory too short, " << (times.back() - start) / options.period
       << " periods after burn-in (need " << options.min_periods << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }

  const auto first = static_cast<std::size_t>(
      std::lower_bound(times.begin(), times.end(), start) - times.begin());
  std::vector<double> envelope;
  for (std::size_t i = first; i < d.size(); ++i) envelope.push_back(std::abs(d[i]));

  Classification c;
  const double peak = *std::max_element(envelope.begin(), envelope.end());
  if (peak <= 1e-12 * options.amplitude_scale) {
    c.verdict = Dynamics::Converging;
    c.final_amplitude = peak;
    return c;
  }

  std::vector<double> maxima;
  for (std::size_t i = 1; i + 1 < envelope.size(); ++i) {
    if (envelope[i] > envelope[i - 1] && envelope[i] >= envelope[i + 1]) {
      maxima.push_back(envelope[i]);
    }
  }
  c.extrema_count = maxima.size();
  if (maxima.size() < 2) {
    // No oscillation to speak of: compare the ends of the window.
    c.final_amplitude = envelope.back();
    c.envelope_ratio = envelope.front() > 0.0 ? envelope.back() / envelope.front() : 0.0;
  } else {
    const std::size_t quartile = std::max<std::size_t>(1, maxima.size() / 4);
    const double head = std::accumulate(maxima.begin(), maxima.begin() + quartile, 0.0) / quartile;
    const double tail = std::accumulate(maxima.end() - quartile, maxima.end(), 0.0) / quartile;
    c.envelope_ratio = tail / head;
    c.final_amplitude = maxima.back();
  }

  if (c.envelope_ratio < options.converging_below) {
    c.verdict = Dynamics::Converging;
  } else if (c.envelope_ratio > options.oscillating_above &&
             c.final_amplitude > 1e-6 * options.amplitude_scale) {
    c.verdict = Dynamics::Oscillating;
  } else {
    c.verdict = Dynamics::Indeterminate;
  }
  return c;
}

Classification classify_trajectory(const Trajectory& traj, const ClassifierOptions& options) {
  if (traj.dimension() < 2) throw Error(ErrorKind::InvalidArgument, "classify: need two queues");
  std::vector<double> times, diff;
  times.reserve(traj.size() - traj.history_nodes());
  diff.reserve(times.capacity());
  for (std::size_t k = traj.history_nodes(); k < traj.size(); ++k) {
    const auto y = traj.state(k);
    times.push_back(traj.time(k));
    diff.push_back(y[0] - y[1]);
  }
  return classify_signal(times, diff, options);
}

}  // namespace qfluid
