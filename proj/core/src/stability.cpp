#include "qfluid/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qfluid/error.hpp"

namespace qfluid {

namespace {

[[noreturn]] void domain(const std::string& what) { throw Error(ErrorKind::Domain, what); }

void require_rates(double lambda, double mu) {
  if (!(std::isfinite(lambda) && lambda > 0.0 && std::isfinite(mu) && mu > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "lambda and mu must be finite and > 0");
  }
}

void require_oscillatory_constant(double lambda, double mu) {
  require_rates(lambda, mu);
  if (!(lambda > 2.0 * mu)) {
    domain("no oscillatory instability: system stable for all delta (needs lambda > 2 mu)");
  }
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::array<std::complex<double>, 2> SlowFlowMatrix::eigenvalues() const {
  const double half_trace = 0.5 * trace();
  const double disc = half_trace * half_trace - determinant();
  const std::complex<double> root = std::sqrt(std::complex<double>(disc, 0.0));
  return {half_trace + root, half_trace - root};
}

double SlowFlowMatrix::max_real_eigenvalue() const {
  const auto ev = eigenvalues();
  return std::max(ev[0].real(), ev[1].real());
}

RouthHurwitz routh_hurwitz(const SlowFlowMatrix& k) noexcept {
  return {k.determinant(), -k.trace(), 1.0};
}

// ---------------------------------------------------------------------------
// Constant delay

double omega_cr_constant(double lambda, double mu) {
  require_rates(lambda, mu);
  const double radicand = lambda * lambda - 4.0 * mu * mu;
  if (radicand < 0.0) {
    domain("no oscillatory instability: system stable for all delta (needs lambda > 2 mu)");
  }
  return 0.5 * std::sqrt(radicand);
}

double delta_cr_constant(double lambda, double mu) {
  require_oscillatory_constant(lambda, mu);
  return 2.0 * std::acos(-2.0 * mu / lambda) / std::sqrt(lambda * lambda - 4.0 * mu * mu);
}

SlowFlowMatrix slow_flow_constant(double lambda, double mu, double alpha, double detuning) {
  const double w = omega_cr_constant(lambda, mu);
  const double d = delta_cr_constant(lambda, mu);
  const double d1 = detuning;
  const double den = 2.0 * (d * d * w * w + (d * mu + 1.0) * (d * mu + 1.0));
  const double cross = alpha * (d * mu * mu - d * w * w + mu);
  const double shift = 2.0 * d1 * w * (d * mu * mu + d * w * w + mu);
  return {
      -w * (2.0 * alpha * d * mu + alpha - 2.0 * d1 * w) / den,
      (cross - shift) / den,
      (cross + shift) / den,
      w * (2.0 * alpha * d * mu + alpha + 2.0 * d1 * w) / den,
  };
}

RouthHurwitz routh_hurwitz_formula_constant(double lambda, double mu, double alpha,
                                            double detuning) {
  const double d = delta_cr_constant(lambda, mu);
  const double spread = lambda * lambda - 4.0 * mu * mu;
  const double den = d * d * lambda * lambda + 8.0 * d * mu + 4.0;
  return {
      lambda * lambda * (detuning * detuning * spread - alpha * alpha) / (4.0 * den),
      -2.0 * detuning * spread / den,
      1.0,
  };
}

double delta1_threshold_constant(double lambda, double mu, double alpha) {
  require_oscillatory_constant(lambda, mu);
  return -std::sqrt(alpha * alpha / (lambda * lambda - 4.0 * mu * mu));
}

double delta_mod_constant(double lambda, double mu, double alpha, double epsilon) {
  return delta_cr_constant(lambda, mu) + epsilon * delta1_threshold_constant(lambda, mu, alpha);
}

// ---------------------------------------------------------------------------
// Moving average

double omega_ma(double lambda, double mu, double delta) {
  require_rates(lambda, mu);
  const double limit = lambda / (mu * mu);
  if (!(delta > 0.0 && delta < limit)) {
    std::ostringstream os;
    os << "frequency not real: outside oscillatory regime (need 0 < delta < " << limit
       << ", got " << delta << ")";
    domain(os.str());
  }
  return std::sqrt(lambda / delta - mu * mu);
}

CriticalResiduals ma_critical_residuals(double lambda, double mu, double delta) {
  const double w = omega_ma(lambda, mu, delta);
  const double phase = delta * w;
  const double s = std::sin(phase);
  const double c = std::cos(phase);
  CriticalResiduals r;
  r.sin_form = s + 2.0 * mu * delta * w / lambda;
  r.cos_form = c + 1.0 - 2.0 * mu * mu * delta / lambda;
  r.combined = 2.0 + (2.0 - 4.0 * delta * mu * mu / lambda) * c + 4.0 * delta * mu / lambda * w * s;
  return r;
}

double delta_cr_ma(double lambda, double mu) {
  require_rates(lambda, mu);
  const double limit = lambda / (mu * mu);
  // The combined form is 2 (1 + cos(.)) >= 0 and never changes sign, so
  // bracket on the sin form and keep the first root that also solves the
  // cos form.
  constexpr int kGrid = 10000;
  const double h = limit / kGrid;
  auto sin_form = [&](double d) { return ma_critical_residuals(lambda, mu, d).sin_form; };

  double lo = h;
  double f_lo = sin_form(lo);
  for (int i = 2; i < kGrid; ++i) {
    double hi = i * h;
    double f_hi = sin_form(hi);
    if (f_lo == 0.0 || sign_of(f_lo) != sign_of(f_hi)) {
      double a = lo, b = hi, fa = f_lo;
      double root = f_lo == 0.0 ? lo : 0.5 * (a + b);
      if (f_lo != 0.0) {
        for (int it = 0; it < 200; ++it) {
          root = 0.5 * (a + b);
          const double fr = sin_form(root);
          if (std::abs(fr) < 1e-12 && b - a < 1e-12 * limit) break;
          if (fr == 0.0) break;
          if (sign_of(fr) == sign_of(fa)) {
            a = root;
            fa = fr;
          } else {
            b = root;
          }
          if (b - a <= std::numeric_limits<double>::epsilon() * root) break;
        }
      }
      const auto r = ma_critical_residuals(lambda, mu, root);
      if (std::abs(r.sin_form) < 1e-8 && std::abs(r.cos_form) < 1e-8) return root;
    }
    lo = hi;
    f_lo = f_hi;
  }
  domain("no critical delay in oscillatory regime");
}

namespace {

SlowFlowMatrix slow_flow_ma_at(double lambda, double mu, double alpha, double detuning,
                               double d) {
  const double w = omega_ma(lambda, mu, d);
  const double d1 = detuning;
  const double mu2 = mu * mu;
  const double mu3 = mu2 * mu;
  const double den =
      d * (d * (8.0 * mu3 * d - lambda * lambda - 12.0 * lambda * mu + 12.0 * mu2) - 16.0 * lambda);
  const double load = lambda - mu2 * d;  // > 0 inside the oscillatory regime
  const double diag = alpha * d * w * (mu * d * (-4.0 * mu2 * d + 3.0 * lambda - 6.0 * mu) + 4.0 * lambda);
  const double off = alpha * d * load * (-4.0 * mu2 * d + lambda - 6.0 * mu);
  const double twist =
      d1 * w * (d * (-4.0 * mu3 * d + lambda * lambda + 8.0 * lambda * mu - 4.0 * mu2) + 8.0 * lambda);
  const double drift = 2.0 * d1 * load * (lambda - 2.0 * mu * (mu * d + 1.0));
  return {
      (diag - drift) / den,
      (off + twist) / den,
      (off - twist) / den,
      (-diag - drift) / den,
  };
}

}  // namespace

SlowFlowMatrix slow_flow_ma(double lambda, double mu, double alpha, double detuning) {
  return slow_flow_ma_at(lambda, mu, alpha, detuning, delta_cr_ma(lambda, mu));
}

RouthHurwitz routh_hurwitz_formula_ma(double lambda, double mu, double alpha, double detuning) {
  const double d = delta_cr_ma(lambda, mu);
  const double mu2 = mu * mu;
  const double den = -d * lambda * lambda - 4.0 * lambda * (3.0 * d * mu + 4.0) +
                     4.0 * d * mu2 * (2.0 * d * mu + 3.0);
  const double load = lambda - d * mu2;
  return {
      -lambda * load *
          (detuning * detuning * (d * (lambda + 4.0 * mu) + 4.0) - alpha * alpha * d * d) /
          (d * d * d * den),
      4.0 * detuning * load * (lambda - 2.0 * mu * (d * mu + 1.0)) / (d * den),
      1.0,
  };
}

std::string_view to_string(ThresholdSign rule) noexcept {
  switch (rule) {
    case ThresholdSign::IntegrationValidated:
      return "integration_validated";
    case ThresholdSign::RouthHurwitz:
      return "routh_hurwitz";
    case ThresholdSign::TongueConditions:
      return "tongue_conditions";
  }
  return "unknown";
}

double delta1_magnitude_ma(double lambda, double mu, double alpha) {
  const double d = delta_cr_ma(lambda, mu);
  return std::sqrt(alpha * alpha * d * d / (d * lambda + 4.0 * d * mu + 4.0));
}

namespace {

double routh_hurwitz_side_ma(double lambda, double mu, double alpha, double magnitude) {
  constexpr int kSamples = 4000;
  const double dcr = delta_cr_ma(lambda, mu);
  auto flow = [&](double d1) { return slow_flow_ma_at(lambda, mu, alpha, d1, dcr); };
  auto stable_at = [&](double d1) { return routh_hurwitz(flow(d1)).stable(); };

  bool stable_below = false, stable_above = false, stable_inside = false;
  for (int i = 0; i < kSamples; ++i) {
    const double d1 = -2.0 * magnitude + 4.0 * magnitude * (i + 0.5) / kSamples;
    if (!stable_at(d1)) continue;
    if (d1 < -magnitude) {
      stable_below = true;
    } else if (d1 > magnitude) {
      stable_above = true;
    } else {
      stable_inside = true;
    }
  }
  if (stable_below == stable_above || stable_inside) {
    std::ostringstream os;
    os << "ambiguous stable side of the moving-average slow flow:";
    for (double probe : {-1.5 * magnitude, 1.5 * magnitude}) {
      const auto rh = routh_hurwitz(flow(probe));
      os << " detuning " << probe << " -> a0 " << (rh.a0 > 0 ? '+' : '-') << ", a1 "
         << (rh.a1 > 0 ? '+' : '-') << ";";
    }
    throw Error(ErrorKind::Numerical, os.str());
  }
  // Refine the boundary between the unstable core and the stable tail.
  const double dir = stable_above ? 1.0 : -1.0;
  double inner = 0.0;
  double outer = 2.0 * magnitude * dir;
  for (int it = 0; it < 200 && std::abs(outer - inner) > 1e-14 * magnitude; ++it) {
    const double mid = 0.5 * (inner + outer);
    (stable_at(mid) ? outer : inner) = mid;
  }
  return outer;
}

}  // namespace

double delta1_threshold_ma(double lambda, double mu, double alpha, ThresholdSign rule) {
  const double magnitude = delta1_magnitude_ma(lambda, mu, alpha);
  if (magnitude == 0.0) return 0.0;
  switch (rule) {
    case ThresholdSign::IntegrationValidated:
      return magnitude;
    case ThresholdSign::RouthHurwitz:
      return routh_hurwitz_side_ma(lambda, mu, alpha, magnitude);
    case ThresholdSign::TongueConditions: {
      if (lambda <= 2.0 * mu) return magnitude;
      const double split = (lambda - 2.0 * mu) / (2.0 * mu * mu);
      return delta_cr_ma(lambda, mu) < split ? -magnitude : magnitude;
    }
  }
  return magnitude;
}

double delta_mod_ma(double lambda, double mu, double alpha, double epsilon, ThresholdSign rule) {
  return delta_cr_ma(lambda, mu) + epsilon * delta1_threshold_ma(lambda, mu, alpha, rule);
}

// ---------------------------------------------------------------------------
// Report

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Stable:
      return "stable";
    case Verdict::Unstable:
      return "unstable";
    case Verdict::Boundary:
      return "boundary";
  }
  return "unknown";
}

StabilityReport stability_report(ModelKind kind, const ModelParams& p, ThresholdSign rule) {
  p.validate();
  StabilityReport r;
  r.kind = kind;
  r.params = p;
  r.threshold_rule = rule;

  double at_resonance = 0.0;
  if (kind == ModelKind::ConstantDelay) {
    r.delta_cr = delta_cr_constant(p.lambda, p.mu);
    r.omega_cr = omega_cr_constant(p.lambda, p.mu);
    at_resonance = delta1_threshold_constant(p.lambda, p.mu, p.alpha);
    r.delta_mod_alternative = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.delta_cr = delta_cr_ma(p.lambda, p.mu);
    r.omega_cr = omega_ma(p.lambda, p.mu, r.delta_cr);
    at_resonance = delta1_threshold_ma(p.lambda, p.mu, p.alpha, rule);
    const ThresholdSign other = rule == ThresholdSign::IntegrationValidated
                                    ? ThresholdSign::RouthHurwitz
                                    : ThresholdSign::IntegrationValidated;
    const double alternative = delta1_threshold_ma(p.lambda, p.mu, p.alpha, other);
    r.delta_mod_alternative = r.delta_cr + p.epsilon * alternative;
    r.sign_conflict = sign_of(alternative) != sign_of(at_resonance);
  }

  r.gamma_resonant = 2.0 * r.omega_cr;
  r.resonant = std::abs(p.gamma - r.gamma_resonant) / r.omega_cr < kResonanceTolerance;
  r.delta_mod_at_resonance = r.delta_cr + p.epsilon * at_resonance;
  // Away from 2:1 resonance the first-order expansion sees no forcing effect.
  r.delta1_threshold = r.resonant ? at_resonance : 0.0;
  r.delta_mod = r.delta_cr + p.epsilon * r.delta1_threshold;

  r.detuning = p.epsilon > 0.0 ? (p.delta - r.delta_cr) / p.epsilon : 0.0;
  const double effective_alpha = r.resonant ? p.alpha : 0.0;
  r.coefficients = routh_hurwitz(kind == ModelKind::ConstantDelay
                                     ? slow_flow_constant(p.lambda, p.mu, effective_alpha, r.detuning)
                                     : slow_flow_ma(p.lambda, p.mu, effective_alpha, r.detuning));

  const double gap = p.delta - r.delta_mod;
  const double tol = 1e-12 * std::max(1.0, r.delta_mod);
  r.verdict = gap < -tol ? Verdict::Stable : (gap > tol ? Verdict::Unstable : Verdict::Boundary);
  return r;
}

}  // namespace qfluid
