// Serial vs parallel timings for the three hot kernels. Both variants produce identical output,
// so the comparison is purely about wall time.
#include <benchmark/benchmark.h>

#include "wlab/ensemble.hpp"
#include "wlab/experiments.hpp"
#include "wlab/spectral.hpp"

using namespace wlab;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_Sample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = EnsembleProfile::goe(n);
  std::uint64_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample<double>(p, 1, index++, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * (n + 1) / 2));
}

void BM_HsApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = sample<double>(EnsembleProfile::goe(n), 7);
  const auto f = TestFunction::parse("gauss:0:1");
  const auto grid = hs_grid_for(operator_norm(eigh(x)), f, 400, 200);
  for (auto _ : state) benchmark::DoNotOptimize(hs_apply(x, f, 3, grid, exec_of(state)));
}

void BM_ReplicaLoop(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = EnsembleProfile::goe(n);
  const auto f = TestFunction::parse("gauss:0:1");
  McOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(entry_fluctuation_mc(p, f, Entry{1, 2}, n, 64, 3, opt));
}

}  // namespace

BENCHMARK(BM_Sample)->ArgsProduct({{256, 1024}, {0, 1}})->ArgNames({"n", "parallel"})->UseRealTime();
BENCHMARK(BM_HsApply)->ArgsProduct({{64}, {0, 1}})->ArgNames({"n", "parallel"})->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicaLoop)->ArgsProduct({{128}, {0, 1}})->ArgNames({"n", "parallel"})->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
