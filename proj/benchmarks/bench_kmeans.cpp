#include <benchmark/benchmark.h>

#include <random>

#include "pdp/cell_cluster.hpp"

namespace {

pdp::Points gaussian(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  pdp::Points p(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (auto& x : p.row(i)) x = g(rng);
  return p;
}

void BM_KMeans(benchmark::State& state) {
  const auto points = gaussian(static_cast<std::size_t>(state.range(0)), 100);
  for (auto _ : state) benchmark::DoNotOptimize(pdp::kmeans(points, 8, 1).dispersion);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KMeans)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_AvgDispersion(benchmark::State& state) {
  const auto points = gaussian(1000, 100);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pdp::avg_dispersion(points, 8, 8, 1, threads));
}
BENCHMARK(BM_AvgDispersion)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
