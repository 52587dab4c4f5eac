#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "qfluid/dde.hpp"
#include "qfluid/experiment.hpp"
#include "qfluid/fluid.hpp"
#include "qfluid/stability.hpp"

namespace {

qfluid::ModelParams params(double lambda, double gamma, double delta) {
  qfluid::ModelParams p;
  p.lambda = lambda;
  p.mu = 1;
  p.alpha = 1;
  p.epsilon = 0.2;
  p.gamma = gamma;
  p.delta = delta;
  return p;
}

void BM_IntegrateConstantDelay(benchmark::State& state) {
  const auto p = params(3, std::sqrt(5.0), 1.947);
  const auto history = qfluid::HistoryFunction::constant(1, 2);
  qfluid::IntegrationConfig cfg{static_cast<int>(state.range(0)), 500.0};
  for (auto _ : state) {
    auto traj = qfluid::integrate(qfluid::ModelKind::ConstantDelay, p, history, cfg);
    benchmark::DoNotOptimize(traj.state(traj.size() - 1).data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(500.0 / p.delta * state.range(0)));
}
BENCHMARK(BM_IntegrateConstantDelay)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_IntegrateMovingAverage(benchmark::State& state) {
  const auto p = params(10, std::sqrt(10 / 2.1448 - 1), 2.18);
  const auto history = qfluid::HistoryFunction::constant(3, 4);
  qfluid::IntegrationConfig cfg{static_cast<int>(state.range(0)), 500.0};
  for (auto _ : state) {
    auto traj = qfluid::integrate(qfluid::ModelKind::MovingAverage, p, history, cfg);
    benchmark::DoNotOptimize(traj.state(traj.size() - 1).data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(500.0 / p.delta * state.range(0)));
}
BENCHMARK(BM_IntegrateMovingAverage)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_DeltaCrMovingAverage(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(qfluid::delta_cr_ma(10, 1));
}
BENCHMARK(BM_DeltaCrMovingAverage)->Unit(benchmark::kMicrosecond);

void BM_StabilityReport(benchmark::State& state) {
  const auto p = params(10, std::sqrt(10 / 2.1448 - 1), 2.18);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qfluid::stability_report(qfluid::ModelKind::MovingAverage, p));
  }
}
BENCHMARK(BM_StabilityReport)->Unit(benchmark::kMicrosecond);

void BM_ClassifyTrajectory(benchmark::State& state) {
  qfluid::ScenarioConfig cfg;
  cfg.params = params(3, std::sqrt(5.0), 1.977);
  cfg.history = qfluid::HistoryFunction::constant(1, 2);
  const auto traj = qfluid::integrate(cfg.kind, cfg.params, cfg.history, cfg.integration());
  const auto options = qfluid::classifier_for(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(qfluid::classify_trajectory(traj, options));
}
BENCHMARK(BM_ClassifyTrajectory)->Unit(benchmark::kMillisecond);

void BM_InfiniteServerQuadrature(benchmark::State& state) {
  const auto rates = qfluid::RateFunction::sinusoidal(10, 0.2, std::sqrt(96.0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qfluid::mean_infinite_server_quadrature(60.0, 3.0, rates));
  }
}
BENCHMARK(BM_InfiniteServerQuadrature)->Unit(benchmark::kMicrosecond);

void BM_ThresholdScan(benchmark::State& state) {
  qfluid::ScenarioConfig cfg;
  cfg.params = params(10, std::sqrt(96.0), 0.34);
  cfg.history = qfluid::HistoryFunction::constant(3, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qfluid::empirical_threshold_scan(cfg, 0.30, 0.38).threshold);
  }
}
BENCHMARK(BM_ThresholdScan)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
