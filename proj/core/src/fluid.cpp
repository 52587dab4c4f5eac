#include "qfluid/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "qfluid/error.hpp"

namespace qfluid {

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}

constexpr double kQuadTolerance = 1e-10;

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson over [a, b] after splitting at `breaks` and into panels no
// wider than `max_panel`; the tolerance is shared in proportion to width.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::vector<double> breaks, double max_panel) {
  if (b <= a) return 0.0;
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (hi <= lo) continue;
    const auto panels = static_cast<int>(std::ceil((hi - lo) / max_panel));
    const double h = (hi - lo) / panels;
    for (int k = 0; k < panels; ++k) {
      const double x0 = lo + k * h;
      const double x1 = (k + 1 == panels) ? hi : x0 + h;
      const double f0 = f(x0), f1 = f(x1), fm = f(0.5 * (x0 + x1));
      sum += adaptive_simpson(f, x0, x1, f0, fm, f1, simpson(f0, fm, f1, x1 - x0),
                              kQuadTolerance * (x1 - x0) / (b - a), 48);
    }
  }
  return sum;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  i = std::min(i, xs.size() - 2);
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + w * (ys[i + 1] - ys[i]);
}

}  // namespace

RateFunction RateFunction::constant(double lambda, double mu) {
  if (!(std::isfinite(lambda) && lambda >= 0.0)) invalid("constant rate: lambda must be >= 0");
  if (!(std::isfinite(mu) && mu > 0.0)) invalid("constant rate: mu must be > 0");
  RateFunction r;
  r.shape_ = Shape::Constant;
  r.lambda_ = lambda;
  r.mu_ = mu;
  return r;
}

RateFunction RateFunction::sinusoidal(double lambda, double amplitude, double gamma, double mu) {
  if (!(std::isfinite(lambda) && lambda >= 0.0)) invalid("sinusoidal rate: lambda must be >= 0");
  if (!(std::isfinite(amplitude) && std::abs(amplitude) <= 1.0)) {
    invalid("sinusoidal rate: |amplitude| must be <= 1 so lambda(t) >= 0");
  }
  if (!(std::isfinite(gamma) && gamma >= 0.0)) invalid("sinusoidal rate: gamma must be >= 0");
  if (!(std::isfinite(mu) && mu > 0.0)) invalid("sinusoidal rate: mu must be > 0");
  RateFunction r;
  r.shape_ = Shape::Sinusoidal;
  r.lambda_ = lambda;
  r.amplitude_ = amplitude;
  r.gamma_ = gamma;
  r.mu_ = mu;
  return r;
}

RateFunction RateFunction::tabulated(std::vector<double> times, std::vector<double> lambdas,
                                     std::vector<double> mus) {
  if (times.size() < 2 || lambdas.size() != times.size() || mus.size() != times.size()) {
    invalid("tabulated rate: need >= 2 rows with matching lengths");
  }
  if (times.front() != 0.0) invalid("tabulated rate: times must start at 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) invalid("tabulated rate: times must increase");
    if (!(std::isfinite(lambdas[i]) && lambdas[i] >= 0.0)) invalid("tabulated rate: lambda < 0");
    if (!(std::isfinite(mus[i]) && mus[i] > 0.0)) invalid("tabulated rate: mu must be > 0");
  }
  RateFunction r;
  r.shape_ = Shape::Tabulated;
  r.mu_cumulative_.assign(times.size(), 0.0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    r.mu_cumulative_[i] =
        r.mu_cumulative_[i - 1] + 0.5 * (mus[i] + mus[i - 1]) * (times[i] - times[i - 1]);
  }
  r.times_ = std::move(times);
  r.lambdas_ = std::move(lambdas);
  r.mus_ = std::move(mus);
  return r;
}

RateFunction RateFunction::from_params(const ModelParams& p) {
  return sinusoidal(p.lambda, p.alpha * p.epsilon, p.gamma, p.mu);
}

double RateFunction::horizon() const noexcept {
  return shape_ == Shape::Tabulated ? times_.back() : std::numeric_limits<double>::infinity();
}

double RateFunction::arrival(double t) const {
  switch (shape_) {
    case Shape::Constant:
      return lambda_;
    case Shape::Sinusoidal:
      return lambda_ * (1.0 + amplitude_ * std::sin(gamma_ * t));
    case Shape::Tabulated:
      return interpolate(times_, lambdas_, t);
  }
  return 0.0;
}

double RateFunction::service(double t) const {
  return shape_ == Shape::Tabulated ? interpolate(times_, mus_, t) : mu_;
}

double RateFunction::service_integral(double t) const {
  if (shape_ != Shape::Tabulated) return mu_ * t;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  i = std::min(i, times_.size() - 2);
  return mu_cumulative_[i] + 0.5 * (mus_[i] + service(t)) * (t - times_[i]);
}

double mean_infinite_server(double t, double q0, const RateFunction& rates) {
  if (!(t >= 0.0)) invalid("mean_infinite_server: t must be >= 0");
  if (rates.shape() == RateFunction::Shape::Tabulated) {
    return mean_infinite_server_quadrature(t, q0, rates);
  }
  const double lambda = rates.base_lambda();
  const double mu = rates.service(0.0);
  const double decay = std::exp(-mu * t);
  double mean = q0 * decay + lambda / mu * (1.0 - decay);
  if (rates.shape() == RateFunction::Shape::Sinusoidal) {
    const double g = rates.gamma();
    mean += lambda * rates.amplitude() / (mu * mu + g * g) *
            (mu * std::sin(g * t) - g * std::cos(g * t) + decay * g);
  }
  return mean;
}

double mean_infinite_server_quadrature(double t, double q0, const RateFunction& rates) {
  if (!(t >= 0.0)) invalid("mean_infinite_server: t must be >= 0");
  if (t > rates.horizon()) {
    std::ostringstream os;
    os << "mean_infinite_server: t = " << t << " beyond the rate table (" << rates.horizon() << ")";
    invalid(os.str());
  }
  const double m_t = rates.service_integral(t);
  auto integrand = [&](double s) {
    return rates.arrival(s) * std::exp(rates.service_integral(s) - m_t);
  };
  std::vector<double> breaks = rates.table_times();
  double panel = 1.0;
  if (rates.shape() == RateFunction::Shape::Sinusoidal && rates.gamma() > 0.0) {
    panel = std::min(panel, 0.5 * std::numbers::pi / rates.gamma());
  }
  return q0 * std::exp(-m_t) + integrate(integrand, 0.0, t, breaks, panel);
}

double mean_infinite_server_steady(double t, const RateFunction& rates) {
  if (rates.shape() == RateFunction::Shape::Tabulated) {
    invalid("steady mean needs constant or sinusoidal rates");
  }
  const double lambda = rates.base_lambda();
  const double mu = rates.service(0.0);
  double mean = lambda / mu;
  if (rates.shape() == RateFunction::Shape::Sinusoidal) {
    const double g = rates.gamma();
    mean += lambda * rates.amplitude() / (mu * mu + g * g) *
            (mu * std::sin(g * t) - g * std::cos(g * t));
  }
  return mean;
}

double equilibrium_per_queue(double t, const RateFunction& rates) {
  return 0.5 * mean_infinite_server_steady(t, rates);
}

}  // namespace qfluid
