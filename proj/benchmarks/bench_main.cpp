#include "cscb/elliptic.hpp"
#include "cscb/join_solver.hpp"
#include "cscb/yamabe.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace cscb;

void BM_Jacobi(benchmark::State& state) {
  const elliptic::Modulus k(static_cast<double>(state.range(0)) / 1000.0);
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(elliptic::jacobi(t, k));
    t += 1e-3;
  }
}
BENCHMARK(BM_Jacobi)->Arg(0)->Arg(500)->Arg(990)->Arg(999);

void BM_QuarterPeriod(benchmark::State& state) {
  const elliptic::Modulus k(static_cast<double>(state.range(0)) / 1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(elliptic::quarter_period(k));
}
BENCHMARK(BM_QuarterPeriod)->Arg(0)->Arg(707)->Arg(999);

void BM_VerifyResidual(benchmark::State& state) {
  const join::JoinParams p{{1, 0.0}, 1, 1, std::sqrt(10.0), std::sqrt(10.0)};
  const auto sol = join::elliptic_solution(p, elliptic::Modulus::from_squared(0.5));
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(join::verify_residual(p, sol, grid));
  state.SetItemsProcessed(state.iterations() * grid);
}
BENCHMARK(BM_VerifyResidual)->Arg(100)->Arg(500)->Arg(5000);

void BM_FamilyScan(benchmark::State& state) {
  const join::JoinParams p{{1, 0.0}, 1, 2, 2.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(join::family_scan(p, 50));
}
BENCHMARK(BM_FamilyScan);

void BM_Shoot(benchmark::State& state) {
  const yamabe::YamabeProblem prob{5, 3.5, 3, 2.0};
  for (auto _ : state) benchmark::DoNotOptimize(yamabe::shoot(prob, 0.5));
}
BENCHMARK(BM_Shoot);

void BM_CountRadialSolutions(benchmark::State& state) {
  const yamabe::YamabeProblem prob = state.range(0) == 1
                                         ? yamabe::YamabeProblem{3, 2.5, 1, 1.0}
                                         : yamabe::YamabeProblem{5, 3.5, 3, 2.0};
  for (auto _ : state) benchmark::DoNotOptimize(yamabe::count_radial_solutions(prob));
}
BENCHMARK(BM_CountRadialSolutions)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
