#include <benchmark/benchmark.h>

#include "swarmfield/mfg.hpp"
#include "swarmfield/ot.hpp"

using namespace swarmfield;

namespace {

Grid grid(int n) { return Grid(-5.0, 5.0, -5.0, 5.0, n, n); }

void BM_SinkhornCold(benchmark::State& state) {
  const Grid g = grid(static_cast<int>(state.range(0)));
  const DensityField a = gaussian_density(g, {-1.0, 0.5}, 0.85);
  const DensityField b = gaussian_density(g, {1.5, -1.0}, 1.5);
  SinkhornParams p;
  p.kernel = state.range(1) ? SinkhornKernel::dense : SinkhornKernel::separable;
  for (auto _ : state) benchmark::DoNotOptimize(sinkhorn(a, b, p).cost);
}
BENCHMARK(BM_SinkhornCold)->Args({30, 0})->Args({30, 1})->Args({60, 0})->Unit(benchmark::kMillisecond);

void BM_SinkhornWarm(benchmark::State& state) {
  const Grid g = grid(60);
  const DensityField a = gaussian_density(g, {-1.0, 0.5}, 0.85);
  const DensityField b = gaussian_density(g, {1.5, -1.0}, 1.5);
  const DensityField b2 = gaussian_density(g, {1.55, -1.0}, 1.5);
  const SinkhornParams p;
  const SinkhornResult warm = sinkhorn(a, b, p);
  for (auto _ : state) benchmark::DoNotOptimize(sinkhorn(a, b2, p, &warm).cost);
}
BENCHMARK(BM_SinkhornWarm)->Unit(benchmark::kMillisecond);

void BM_AttackerFlow(benchmark::State& state) {
  MfgConfig c;
  c.grid.nx = c.grid.ny = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(attacker_flow(c).back().max());
}
BENCHMARK(BM_AttackerFlow)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_HjbBackward(benchmark::State& state) {
  MfgConfig c;
  const Grid g = c.grid.make();
  ScalarFlow f(static_cast<std::size_t>(c.nt), ScalarField(g));
  for (auto& s : f) {
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) s(i, j) = 0.1 * (g.x_center(i) * g.x_center(i) + g.y_center(j));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(hjb_backward(f, c).front().max_abs());
}
BENCHMARK(BM_HjbBackward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
