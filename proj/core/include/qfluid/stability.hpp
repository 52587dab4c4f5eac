#pragma once

#include <array>
#include <complex>
#include <string_view>

#include "qfluid/model.hpp"

namespace qfluid {

/// Linear slow flow (A', B') = K (A, B) on the amplitudes of the critical
/// oscillation, in slow time epsilon * t.
struct SlowFlowMatrix {
  double k1 = 0.0, k2 = 0.0;
  double k3 = 0.0, k4 = 0.0;

  double trace() const noexcept { return k1 + k4; }
  double determinant() const noexcept { return k1 * k4 - k2 * k3; }
  std::array<std::complex<double>, 2> eigenvalues() const;
  double max_real_eigenvalue() const;
};

/// det(K - rI) = a0 + a1 r + a2 r^2 with a2 = 1.
struct RouthHurwitz {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 1.0;

  /// Both roots in the open left half-plane.
  bool stable() const noexcept { return a0 > 0.0 && a1 > 0.0 && a2 > 0.0; }
};

RouthHurwitz routh_hurwitz(const SlowFlowMatrix& k) noexcept;

// --- Constant-delay model -------------------------------------------------

/// Hopf frequency 0.5 * sqrt(lambda^2 - 4 mu^2). Zero at lambda = 2 mu,
/// Error(Domain) below.
double omega_cr_constant(double lambda, double mu);

/// 2 acos(-2 mu / lambda) / sqrt(lambda^2 - 4 mu^2); requires lambda > 2 mu.
double delta_cr_constant(double lambda, double mu);

/// Slow flow at 2:1 resonance for delay delta_cr + epsilon * detuning.
SlowFlowMatrix slow_flow_constant(double lambda, double mu, double alpha, double detuning);

/// Closed-form a0, a1 of the constant-delay slow flow (independent of the
/// K entries; used to cross-check them).
RouthHurwitz routh_hurwitz_formula_constant(double lambda, double mu, double alpha,
                                            double detuning);

/// Slow flow stable iff detuning < -|alpha| / sqrt(lambda^2 - 4 mu^2).
double delta1_threshold_constant(double lambda, double mu, double alpha);

double delta_mod_constant(double lambda, double mu, double alpha, double epsilon);

// --- Moving-average model -------------------------------------------------

/// sqrt(lambda / delta - mu^2); Error(Domain) unless 0 < delta < lambda / mu^2.
double omega_ma(double lambda, double mu, double delta);

struct CriticalResiduals {
  double sin_form = 0.0;  // sin(D w) + 2 mu D w / lambda
  double cos_form = 0.0;  // cos(D w) + 1 - 2 mu^2 D / lambda
  double combined = 0.0;  // squared-and-added form; >= 0, zero only at roots
};

CriticalResiduals ma_critical_residuals(double lambda, double mu, double delta);

/// Smallest delta in (0, lambda / mu^2) solving both critical equations.
double delta_cr_ma(double lambda, double mu);

SlowFlowMatrix slow_flow_ma(double lambda, double mu, double alpha, double detuning);

RouthHurwitz routh_hurwitz_formula_ma(double lambda, double mu, double alpha, double detuning);

/// How the sign of the moving-average detuning threshold is chosen. The
/// slow-flow coefficients and the tongue conditions put the stable side below
/// delta_cr for lambda = 10, mu = 1, while direct integration of the model
/// places the transition above it.
enum class ThresholdSign {
  IntegrationValidated,  // +magnitude, the side observed in DDE integration
  RouthHurwitz,          // side where a0 > 0 and a1 > 0, found by scanning
  TongueConditions,          // tongue conditions on delta_cr vs (lambda-2mu)/(2mu^2)
};

std::string_view to_string(ThresholdSign rule) noexcept;

/// sqrt(alpha^2 delta_cr^2 / (delta_cr lambda + 4 delta_cr mu + 4)).
double delta1_magnitude_ma(double lambda, double mu, double alpha);

double delta1_threshold_ma(double lambda, double mu, double alpha,
                           ThresholdSign rule = ThresholdSign::IntegrationValidated);

double delta_mod_ma(double lambda, double mu, double alpha, double epsilon,
                    ThresholdSign rule = ThresholdSign::IntegrationValidated);

// --- Aggregate report -----------------------------------------------------

enum class Verdict { Stable, Unstable, Boundary };

std::string_view to_string(Verdict v) noexcept;

inline constexpr double kResonanceTolerance = 1e-6;

struct StabilityReport {
  ModelKind kind = ModelKind::ConstantDelay;
  ModelParams params;
  double omega_cr = 0.0;
  double delta_cr = 0.0;
  double gamma_resonant = 0.0;   // 2 * omega_cr
  bool resonant = false;         // |gamma - 2 omega_cr| / omega_cr < 1e-6
  double delta1_threshold = 0.0; // zero when not resonant
  double delta_mod = 0.0;        // delta_cr + epsilon * delta1_threshold
  double delta_mod_at_resonance = 0.0;
  ThresholdSign threshold_rule = ThresholdSign::IntegrationValidated;
  /// Moving-average only: delta_mod_at_resonance under the competing sign rule
  /// (Routh-Hurwitz, or integration-validated when that is not the rule in
  /// use); NaN for the constant-delay model.
  double delta_mod_alternative = 0.0;
  bool sign_conflict = false;
  double detuning = 0.0;         // (delta - delta_cr) / epsilon, 0 when epsilon = 0
  RouthHurwitz coefficients;     // slow flow at `detuning`
  Verdict verdict = Verdict::Boundary;  // params.delta against delta_mod
};

StabilityReport stability_report(ModelKind kind, const ModelParams& p,
                                 ThresholdSign rule = ThresholdSign::IntegrationValidated);

}  // namespace qfluid
