#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qfluid/model.hpp"

namespace qfluid {

struct IntegrationConfig {
  int steps_per_delay = 128;  // N, so that dt = delta / N
  double t_end = 0.0;

  void validate() const;
};

/// A delay differential equation y'(t) = f(t, y(t), y(t - delay)) with a
/// prescribed history on [-delay, 0].
struct DdeProblem {
  using Rhs = std::function<void(double t, std::span<const double> state,
                                 std::span<const double> lagged, std::span<double> out)>;
  using History = std::function<void(double t, std::span<double> out)>;

  std::size_t dimension = 0;
  double delay = 0.0;
  Rhs rhs;
  History history;        // y(t) for t <= 0
  History history_slope;  // y'(t) for t < 0; may be empty (treated as zero)
};

/// Uniformly stepped solution on [-delay, t_end] with cubic Hermite dense
/// output. Node k sits at time (k - N) * dt, so node N is t = 0 exactly.
class Trajectory {
 public:
  Trajectory() = default;

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : states_.size() / dim_; }
  std::size_t history_nodes() const noexcept { return history_nodes_; }
  double dt() const noexcept { return dt_; }
  double t0() const noexcept { return time(0); }
  double t_end() const noexcept { return time(size() - 1); }
  double time(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(history_nodes_)) * dt_;
  }

  std::span<const double> state(std::size_t k) const {
    return {states_.data() + k * dim_, dim_};
  }
  std::span<const double> derivative(std::size_t k) const {
    return {derivs_.data() + k * dim_, dim_};
  }

  /// State at time t in [t0, t_end]: the history function on [-delay, 0],
  /// cubic Hermite between forward nodes, stored values at nodes.
  std::vector<double> sample(double t) const;
  void sample_into(double t, std::span<double> out) const;

 private:
  friend Trajectory integrate(const DdeProblem&, const IntegrationConfig&);

  std::size_t dim_ = 0;
  std::size_t history_nodes_ = 0;
  double dt_ = 0.0;
  std::vector<double> states_;
  std::vector<double> derivs_;
  DdeProblem::History history_;
};

/// Hermite interpolant on one step of width h at fraction theta in [0, 1].
double hermite(double y0, double f0, double y1, double f1, double h, double theta) noexcept;

/// Classic fixed-step RK4 by the method of steps. Lags at full steps hit
/// stored nodes; half-step lags use the dense output (or the history when the
/// lagged time is <= 0). Throws Error(Numerical) on a non-finite state.
Trajectory integrate(const DdeProblem& problem, const IntegrationConfig& cfg);

/// (1/delta) * integral of phi_i over [-delta, 0]: the consistent m_i(0).
std::pair<double, double> initial_moving_average(const HistoryFunction& history, double delta);

/// Builds the fluid model as a DdeProblem (validates its inputs).
DdeProblem make_problem(ModelKind kind, const ModelParams& p, const HistoryFunction& history);

Trajectory integrate(ModelKind kind, const ModelParams& p, const HistoryFunction& history,
                     const IntegrationConfig& cfg);

}  // namespace qfluid
