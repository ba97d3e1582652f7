#include <benchmark/benchmark.h>

#include "ocpstab/grid.hpp"
#include "ocpstab/hbvp.hpp"
#include "ocpstab/linear_analytic.hpp"
#include "ocpstab/linear_discrete.hpp"
#include "ocpstab/pendulum.hpp"
#include "ocpstab/stability.hpp"

namespace {

ocpstab::LinearOCPParams reference_params(double alpha) {
  return ocpstab::LinearOCPParams{1.0, 1.0, 1.0, 0.0, 20.0, 10.0, alpha};
}

void BM_SolveBvp(benchmark::State& state) {
  const auto params = reference_params(1e-1);
  const ocpstab::TimeGrid grid(params.T, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ocpstab::solve_bvp(params, grid, ocpstab::Scheme::midpoint()));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveBvp)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_StabilityReport(benchmark::State& state) {
  const auto params = reference_params(1e-2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ocpstab::stability_report(params, 0.1, ocpstab::Scheme::midpoint()));
  }
}
BENCHMARK(BM_StabilityReport);

void BM_PhaseSweep16(benchmark::State& state) {
  const ocpstab::SweepProblem prob;
  const auto alpha = ocpstab::log_spaced(1e-5, 1.0, 16);
  const auto dt = ocpstab::log_spaced(1e-2, 1.0, 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ocpstab::phase_sweep(prob, alpha, dt, ocpstab::Scheme::midpoint(), static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_PhaseSweep16)->Arg(1)->Arg(4)->Arg(0)->UseRealTime();

void BM_PendulumNewton(benchmark::State& state) {
  const ocpstab::PendulumParams params;
  const auto problem = ocpstab::pendulum_problem(params, 1e-2, 4.0);
  const ocpstab::TimeGrid grid(4.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ocpstab::alpha_continuation_solve(problem, grid, ocpstab::Scheme::midpoint()));
  }
}
BENCHMARK(BM_PendulumNewton)->Arg(20)->Arg(80);

void BM_LinearNewton(benchmark::State& state) {
  const auto params = reference_params(1e-1);
  const auto problem = ocpstab::wrap_linear(params);
  const ocpstab::TimeGrid grid(params.T, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ocpstab::newton_solve(problem, grid, ocpstab::Scheme::midpoint()));
  }
}
BENCHMARK(BM_LinearNewton)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
