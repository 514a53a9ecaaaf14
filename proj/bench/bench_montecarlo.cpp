// Serial reference vs OpenMP kernels on the n=1000, J=20 design.

#include <benchmark/benchmark.h>

#include "shrinkreg/config.hpp"
#include "shrinkreg/montecarlo.hpp"

using namespace shrinkreg;

namespace {

const std::vector<Method> kMethods{Method::Oracle, Method::HE, Method::CW_BC, Method::FE};

const DgpSpec& design() {
  static const DgpSpec spec = *load_config("table1_n1000").dgp;
  return spec;
}

MonteCarloOptions options(std::size_t reps, int workers) {
  MonteCarloOptions opts;
  opts.reps = reps;
  opts.master_seed = 1;
  opts.workers = workers;
  return opts;
}

void BM_replications_serial(benchmark::State& state) {
  const auto opts = options(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(serial::run_replications(design(), kMethods, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_replications_parallel(benchmark::State& state) {
  const auto opts = options(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(run_replications(design(), kMethods, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

const ReplicationTable& table() {
  static const ReplicationTable t = serial::run_replications(design(), kMethods, options(3000, 1));
  return t;
}

void BM_curve_serial(benchmark::State& state) {
  table();
  const auto grid = make_grid(0.5, 1.5, 0.001);
  for (auto _ : state) benchmark::DoNotOptimize(serial::coverage_curve(table(), grid));
}

void BM_curve_parallel(benchmark::State& state) {
  table();
  const auto grid = make_grid(0.5, 1.5, 0.001);
  for (auto _ : state) benchmark::DoNotOptimize(coverage_curve(table(), grid, static_cast<int>(state.range(0))));
}

}  // namespace

BENCHMARK(BM_replications_serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_replications_parallel)->Args({256, 1})->Args({256, 2})->Args({256, 4})->Args({256, 8})
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_curve_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_curve_parallel)->Arg(1)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
