#include "qfluid/dde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "qfluid/error.hpp"

namespace qfluid {

namespace {

constexpr std::size_t kMaxDim = 8;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void blow_up(double t, const std::string& detail) {
  std::ostringstream os;
  os << "integration failed at t = " << t << ": " << detail;
  throw IntegrationFailure(ErrorKind::Numerical, os.str());
}

}  // namespace

void IntegrationConfig::validate() const {
  if (steps_per_delay < 16) {
    throw Error(ErrorKind::InvalidArgument, "steps_per_delay must be >= 16");
  }
  if (!(std::isfinite(t_end) && t_end > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "t_end must be finite and > 0");
  }
}

double hermite(double y0, double f0, double y1, double f1, double h, double theta) noexcept {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + theta;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

std::vector<double> Trajectory::sample(double t) const {
  std::vector<double> out(dim_);
  sample_into(t, out);
  return out;
}

void Trajectory::sample_into(double t, std::span<double> out) const {
  if (size() == 0) throw Error(ErrorKind::InvalidArgument, "sample: empty trajectory");
  const double slack = 1e-9 * dt_;
  if (!(t >= t0() - slack && t <= t_end() + slack)) {
    std::ostringstream os;
    os << "sample: t = " << t << " outside [" << t0() << ", " << t_end() << "]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const double s = t / dt_ + static_cast<double>(history_nodes_);
  const double nearest = std::round(s);
  if (std::abs(s - nearest) < 1e-9) {
    const auto k = static_cast<std::size_t>(std::clamp(nearest, 0.0, double(size() - 1)));
    std::copy_n(states_.begin() + static_cast<std::ptrdiff_t>(k * dim_), dim_, out.begin());
    return;
  }
  if (t < 0.0 && history_) {
    history_(t, out);
    return;
  }
  auto k = static_cast<std::size_t>(std::floor(s));
  k = std::min(k, size() - 2);
  const double theta = s - static_cast<double>(k);
  const auto y0 = state(k);
  const auto y1 = state(k + 1);
  const auto f0 = derivative(k);
  const auto f1 = derivative(k + 1);
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = hermite(y0[i], f0[i], y1[i], f1[i], dt_, theta);
  }
}

Trajectory integrate(const DdeProblem& problem, const IntegrationConfig& cfg) {
  cfg.validate();
  const std::size_t dim = problem.dimension;
  if (dim == 0 || dim > kMaxDim) throw Error(ErrorKind::InvalidArgument, "unsupported dimension");
  if (!(problem.delay > 0.0) || !problem.rhs || !problem.history) {
    throw Error(ErrorKind::InvalidArgument, "DdeProblem needs delay > 0, rhs and history");
  }

  const auto big_n = static_cast<std::size_t>(cfg.steps_per_delay);
  const double dt = problem.delay / static_cast<double>(big_n);
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));

  Trajectory traj;
  traj.dim_ = dim;
  traj.history_nodes_ = big_n;
  traj.dt_ = dt;
  traj.history_ = problem.history;
  traj.states_.resize((big_n + 1 + steps) * dim);
  traj.derivs_.resize(traj.states_.size());

  auto node_state = [&](std::size_t k) { return std::span<double>(traj.states_.data() + k * dim, dim); };
  auto node_deriv = [&](std::size_t k) { return std::span<double>(traj.derivs_.data() + k * dim, dim); };

  for (std::size_t k = 0; k <= big_n; ++k) {
    const double t = traj.time(k);
    problem.history(t, node_state(k));
    if (!all_finite(node_state(k))) blow_up(t, "history is not finite");
    if (problem.history_slope && k < big_n) {
      problem.history_slope(t, node_deriv(k));
    } else {
      std::fill(node_deriv(k).begin(), node_deriv(k).end(), 0.0);
    }
  }

  std::array<double, kMaxDim> lag0{}, lag_half{}, lag1{}, k1{}, k2{}, k3{}, k4{}, tmp{};
  auto sp = [dim](std::array<double, kMaxDim>& a) { return std::span<double>(a.data(), dim); };
  auto csp = [dim](const std::array<double, kMaxDim>& a) {
    return std::span<const double>(a.data(), dim);
  };

  // Lagged state for forward node n (time n*dt): history when n <= N.
  auto lag_at_node = [&](std::size_t n, std::span<double> out) {
    if (n <= big_n) {
      problem.history((static_cast<double>(n) - static_cast<double>(big_n)) * dt, out);
    } else {
      const auto src = traj.state(n);  // global index of time (n - N) * dt is n
      std::copy(src.begin(), src.end(), out.begin());
    }
  };
  // Lagged state at time (n + 1/2)*dt - delay.
  auto lag_at_half = [&](std::size_t n, std::span<double> out) {
    if (n < big_n) {
      problem.history((static_cast<double>(n) + 0.5 - static_cast<double>(big_n)) * dt, out);
    } else {
      const auto y0 = traj.state(n), y1 = traj.state(n + 1);
      const auto f0 = traj.derivative(n), f1 = traj.derivative(n + 1);
      for (std::size_t i = 0; i < dim; ++i) out[i] = hermite(y0[i], f0[i], y1[i], f1[i], dt, 0.5);
    }
  };

  double t = 0.0;
  try {
    // Right derivative at t = 0 for the first step's dense output.
    lag_at_node(0, sp(lag0));
    problem.rhs(0.0, traj.state(big_n), csp(lag0), node_deriv(big_n));

    for (std::size_t n = 0; n < steps; ++n) {
      t = static_cast<double>(n) * dt;
      const std::size_t g = big_n + n;  // global index of t
      const auto y = traj.state(g);

      lag_at_node(n, sp(lag0));
      lag_at_half(n, sp(lag_half));
      lag_at_node(n + 1, sp(lag1));

      std::copy(traj.derivative(g).begin(), traj.derivative(g).end(), k1.begin());
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
      problem.rhs(t + 0.5 * dt, csp(tmp), csp(lag_half), sp(k2));
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
      problem.rhs(t + 0.5 * dt, csp(tmp), csp(lag_half), sp(k3));
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + dt * k3[i];
      const double t_next = static_cast<double>(n + 1) * dt;
      problem.rhs(t_next, csp(tmp), csp(lag1), sp(k4));

      auto next = node_state(g + 1);
      for (std::size_t i = 0; i < dim; ++i) {
        next[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      if (!all_finite(next)) blow_up(t_next, "state became non-finite");
      problem.rhs(t_next, next, csp(lag1), node_deriv(g + 1));
    }
  } catch (const IntegrationFailure&) {
    throw;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Numerical) throw;
    blow_up(t, e.what());
  }
  return traj;
}

std::pair<double, double> initial_moving_average(const HistoryFunction& history, double delta) {
  return {history[0].integral(-delta, 0.0) / delta, history[1].integral(-delta, 0.0) / delta};
}

DdeProblem make_problem(ModelKind kind, const ModelParams& p, const HistoryFunction& history) {
  p.validate();
  history.validate(p.delta);

  DdeProblem problem;
  problem.dimension = state_dimension(kind);
  problem.delay = p.delta;

  if (kind == ModelKind::ConstantDelay) {
    problem.rhs = [p](double t, std::span<const double> y, std::span<const double> lag,
                      std::span<double> out) {
      const auto d = constant_delay_rhs(t, y.first<2>(), lag.first<2>(), p);
      out[0] = d[0];
      out[1] = d[1];
    };
    problem.history = [history](double t, std::span<double> out) {
      out[0] = history[0].value(t);
      out[1] = history[1].value(t);
    };
    problem.history_slope = [history](double t, std::span<double> out) {
      out[0] = history[0].slope(t);
      out[1] = history[1].slope(t);
    };
    return problem;
  }

  const auto [m1, m2] = initial_moving_average(history, p.delta);
  problem.rhs = [p](double t, std::span<const double> y, std::span<const double> lag,
                    std::span<double> out) {
    const auto d = moving_average_rhs(t, y.first<4>(), lag.first<4>(), p);
    std::copy(d.begin(), d.end(), out.begin());
  };
  problem.history = [history, m1, m2](double t, std::span<double> out) {
    out[0] = history[0].value(t);
    out[1] = history[1].value(t);
    out[2] = m1;
    out[3] = m2;
  };
  problem.history_slope = [history](double t, std::span<double> out) {
    out[0] = history[0].slope(t);
    out[1] = history[1].slope(t);
    out[2] = 0.0;
    out[3] = 0.0;
  };
  return problem;
}

Trajectory integrate(ModelKind kind, const ModelParams& p, const HistoryFunction& history,
                     const IntegrationConfig& cfg) {
  return integrate(make_problem(kind, p, history), cfg);
}

}  // namespace qfluid
