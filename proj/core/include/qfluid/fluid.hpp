#pragma once

#include <vector>

#include "qfluid/model.hpp"

namespace qfluid {

/// Arrival and service rates lambda(t), mu(t) of an infinite-server queue
/// with exponential service.
class RateFunction {
 public:
  enum class Shape { Constant, Sinusoidal, Tabulated };

  static RateFunction constant(double lambda, double mu);
  /// lambda(t) = lambda * (1 + amplitude * sin(gamma t)), constant mu.
  static RateFunction sinusoidal(double lambda, double amplitude, double gamma, double mu);
  /// Piecewise-linear tables on times starting at 0; evaluation beyond the
  /// last time is an error.
  static RateFunction tabulated(std::vector<double> times, std::vector<double> lambdas,
                                std::vector<double> mus);
  /// The fluid models' total arrival process: amplitude alpha * epsilon.
  static RateFunction from_params(const ModelParams& p);

  Shape shape() const noexcept { return shape_; }
  double base_lambda() const noexcept { return lambda_; }
  double amplitude() const noexcept { return amplitude_; }
  double gamma() const noexcept { return gamma_; }
  const std::vector<double>& table_times() const noexcept { return times_; }

  double arrival(double t) const;
  double service(double t) const;
  /// Integral of mu over [0, t].
  double service_integral(double t) const;
  /// Largest t at which the rates are defined (infinity unless tabulated).
  double horizon() const noexcept;

 private:
  Shape shape_ = Shape::Constant;
  double lambda_ = 0.0;
  double amplitude_ = 0.0;
  double gamma_ = 0.0;
  double mu_ = 1.0;
  std::vector<double> times_;
  std::vector<double> lambdas_;
  std::vector<double> mus_;
  std::vector<double> mu_cumulative_;  // service integral at each table time
};

/// Mean of the M_t/M_t/inf queue started at q0: closed form for constant and
/// sinusoidal rates, adaptive quadrature for tables.
double mean_infinite_server(double t, double q0, const RateFunction& rates);

/// Same quantity, always through adaptive Simpson quadrature.
double mean_infinite_server_quadrature(double t, double q0, const RateFunction& rates);

/// Periodic steady state lambda/mu + lambda*a*(mu sin gt - g cos gt)/(mu^2+g^2).
/// Requires constant or sinusoidal rates.
double mean_infinite_server_steady(double t, const RateFunction& rates);

/// Symmetric per-queue equilibrium of both fluid models: half the steady mean.
double equilibrium_per_queue(double t, const RateFunction& rates);

}  // namespace qfluid
