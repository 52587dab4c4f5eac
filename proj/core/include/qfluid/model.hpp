#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace qfluid {

enum class ModelKind {
  ConstantDelay,  // state (q1, q2), customers see q(t - delta)
  MovingAverage,  // state (q1, q2, m1, m2), customers see the window mean m
};

std::size_t state_dimension(ModelKind kind) noexcept;
std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

/// Parameters shared by both fluid models. The arrival rate is
/// lambda * (1 + alpha * epsilon * sin(gamma * t)).
struct ModelParams {
  double lambda = 1.0;   // base arrival rate
  double mu = 1.0;       // per-queue service rate
  double alpha = 0.0;    // relative forcing amplitude, in [0, 1]
  double epsilon = 0.0;  // perturbation scale
  double gamma = 0.0;    // forcing frequency (rad / time)
  double delta = 1.0;    // information delay or averaging window

  /// Throws Error(InvalidArgument) naming the first violated invariant.
  void validate() const;
};

double arrival_rate(double t, const ModelParams& p) noexcept;

struct ChoiceFractions {
  double first;
  double second;
};

/// Multinomial-logit split between two queues given the observed levels
/// (lower level attracts more). Evaluated as a logistic of the difference so
/// large levels never overflow. Throws on non-finite input.
ChoiceFractions choice_fraction(double x1, double x2);

/// Right-hand side of the constant-delay model. `delayed` is q(t - delta).
std::array<double, 2> constant_delay_rhs(double t, std::span<const double, 2> state,
                                         std::span<const double, 2> delayed,
                                         const ModelParams& p);

/// Right-hand side of the moving-average model on (q1, q2, m1, m2).
/// Only the queue entries of `delayed` are read.
std::array<double, 4> moving_average_rhs(double t, std::span<const double, 4> state,
                                         std::span<const double, 4> delayed,
                                         const ModelParams& p);

/// Initial function for one queue on [-delta, 0].
class HistoryComponent {
 public:
  static HistoryComponent constant(double value);
  /// Piecewise-linear table; times strictly increasing.
  static HistoryComponent tabulated(std::vector<double> times, std::vector<double> values);

  double value(double t) const;
  double slope(double t) const;
  /// Exact integral of the component over [a, b].
  double integral(double a, double b) const;

  bool is_constant() const noexcept { return times_.empty(); }
  /// Throws unless the component is finite and defined on all of [-delta, 0].
  void validate(double delta) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Initial functions phi_1, phi_2 for the two queues.
class HistoryFunction {
 public:
  HistoryFunction() = default;
  HistoryFunction(HistoryComponent first, HistoryComponent second);

  static HistoryFunction constant(double q1, double q2);

  const HistoryComponent& operator[](std::size_t i) const { return components_.at(i); }
  std::size_t size() const noexcept { return components_.size(); }

  void validate(double delta) const;

 private:
  std::vector<HistoryComponent> components_;
};

}  // namespace qfluid
