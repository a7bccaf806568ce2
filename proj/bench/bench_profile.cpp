// Serial vs OpenMP variation profile over the x-nodes of a dipole.
#include <benchmark/benchmark.h>

#include <omp.h>

#include <vector>

#include "ouvar/harness.hpp"

using namespace ouvar;

namespace {

struct Setup {
  oukernel::DiscreteMeasure f{{{-0.3, 1.0}, {0.4, -1.0}, {2.0, 0.5}}};
  harness::TimeGrid grid = harness::TimeGrid::standard();
  std::vector<double> xs;

  explicit Setup(int nodes) {
    for (int i = 0; i < nodes; ++i) xs.push_back(-6.0 + 12.0 * i / (nodes - 1));
  }
};

void profile_serial(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::profile_serial(s.f, s.grid, varnorm::Rho(3.0), s.xs));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void profile_parallel(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::profile_parallel(s.f, s.grid, varnorm::Rho(3.0), s.xs));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(profile_serial)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(profile_parallel)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
