#include "qfluid/model.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>
#include <string>

#include "qfluid/error.hpp"

namespace qfluid {

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

std::size_t state_dimension(ModelKind kind) noexcept {
  return kind == ModelKind::ConstantDelay ? 2 : 4;
}

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::ConstantDelay ? "constant_delay" : "moving_average";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "constant_delay" || text == "constant" || text == "cd") {
    return ModelKind::ConstantDelay;
  }
  if (text == "moving_average" || text == "ma") {
    return ModelKind::MovingAverage;
  }
  invalid("unknown model kind '" + std::string(text) +
          "' (expected constant_delay or moving_average)");
}

void ModelParams::validate() const {
  if (!(std::isfinite(lambda) && lambda > 0.0)) invalid("lambda must be finite and > 0");
  if (!(std::isfinite(mu) && mu > 0.0)) invalid("mu must be finite and > 0");
  if (!(std::isfinite(delta) && delta > 0.0)) invalid("delta must be finite and > 0");
  if (!finite_nonneg(alpha) || alpha > 1.0) invalid("alpha must lie in [0, 1]");
  if (!finite_nonneg(epsilon)) invalid("epsilon must be finite and >= 0");
  if (!finite_nonneg(gamma)) invalid("gamma must be finite and >= 0");
  if (alpha * epsilon > 1.0) invalid("alpha * epsilon must be <= 1 so the arrival rate stays >= 0");
}

double arrival_rate(double t, const ModelParams& p) noexcept {
  return p.lambda * (1.0 + p.alpha * p.epsilon * std::sin(p.gamma * t));
}

ChoiceFractions choice_fraction(double x1, double x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2)) {
    std::ostringstream os;
    os << "choice_fraction: non-finite queue level (" << x1 << ", " << x2 << ")";
    throw Error(ErrorKind::Numerical, os.str());
  }
  // Only ever exponentiate a non-positive number.
  const double d = x1 - x2;
  if (d > 0.0) {
    const double e = std::exp(-d);
    return {e / (1.0 + e), 1.0 / (1.0 + e)};
  }
  const double e = std::exp(d);
  return {1.0 / (1.0 + e), e / (1.0 + e)};
}

std::array<double, 2> constant_delay_rhs(double t, std::span<const double, 2> state,
                                         std::span<const double, 2> delayed,
                                         const ModelParams& p) {
  const double rate = arrival_rate(t, p);
  const auto [p1, p2] = choice_fraction(delayed[0], delayed[1]);
  return {rate * p1 - p.mu * state[0], rate * p2 - p.mu * state[1]};
}

std::array<double, 4> moving_average_rhs(double t, std::span<const double, 4> state,
                                         std::span<const double, 4> delayed,
                                         const ModelParams& p) {
  const double rate = arrival_rate(t, p);
  const auto [p1, p2] = choice_fraction(state[2], state[3]);
  return {rate * p1 - p.mu * state[0], rate * p2 - p.mu * state[1],
          (state[0] - delayed[0]) / p.delta, (state[1] - delayed[1]) / p.delta};
}

// ---------------------------------------------------------------------------
// History

HistoryComponent HistoryComponent::constant(double value) {
  HistoryComponent c;
  c.values_ = {value};
  return c;
}

HistoryComponent HistoryComponent::tabulated(std::vector<double> times,
                                             std::vector<double> values) {
  if (times.size() != values.size() || times.size() < 2) {
    invalid("tabulated history needs >= 2 (time, value) pairs of equal length");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
      invalid("tabulated history contains non-finite entries");
    }
    if (i > 0 && !(times[i] > times[i - 1])) invalid("tabulated history times must increase");
  }
  HistoryComponent c;
  c.times_ = std::move(times);
  c.values_ = std::move(values);
  return c;
}

namespace {

// Index i such that times[i] <= t <= times[i+1], clamped to the table.
std::size_t segment_of(const std::vector<double>& times, double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  auto i = static_cast<std::size_t>(std::distance(times.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, times.size() - 2);
}

}  // namespace

double HistoryComponent::value(double t) const {
  if (is_constant()) return values_.front();
  const std::size_t i = segment_of(times_, t);
  const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

double HistoryComponent::slope(double t) const {
  if (is_constant()) return 0.0;
  const std::size_t i = segment_of(times_, t);
  return (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i]);
}

double HistoryComponent::integral(double a, double b) const {
  if (is_constant()) return values_.front() * (b - a);
  if (b < a) return -integral(b, a);
  // Trapezoid over the breakpoints inside [a, b] is exact for a linear table.
  double sum = 0.0;
  double left = a;
  double left_value = value(a);
  for (double node : times_) {
    if (node <= a) continue;
    if (node >= b) break;
    const double v = value(node);
    sum += 0.5 * (left_value + v) * (node - left);
    left = node;
    left_value = v;
  }
  sum += 0.5 * (left_value + value(b)) * (b - left);
  return sum;
}

void HistoryComponent::validate(double delta) const {
  if (is_constant()) {
    if (!std::isfinite(values_.front())) invalid("history value must be finite");
    return;
  }
  const double tol = 1e-12 * std::max(1.0, delta);
  if (times_.front() > -delta + tol || times_.back() < -tol) {
    invalid("tabulated history must cover [-delta, 0]");
  }
}

HistoryFunction::HistoryFunction(HistoryComponent first, HistoryComponent second)
    : components_{std::move(first), std::move(second)} {}

HistoryFunction HistoryFunction::constant(double q1, double q2) {
  return {HistoryComponent::constant(q1), HistoryComponent::constant(q2)};
}

void HistoryFunction::validate(double delta) const {
  if (components_.size() != 2) invalid("history must provide exactly two queue components");
  for (const auto& c : components_) c.validate(delta);
}

}  // namespace qfluid
