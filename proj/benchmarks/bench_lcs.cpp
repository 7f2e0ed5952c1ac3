#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "pdp/paradigm_cluster.hpp"

namespace {

std::string word(std::mt19937_64& rng, std::size_t len) {
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += static_cast<char>('a' + rng() % 6);
  return s;
}

void BM_LcsPair(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = word(rng, len), b = word(rng, len);
  for (auto _ : state) benchmark::DoNotOptimize(pdp::lcs_pair(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LcsPair)->RangeMultiplier(2)->Range(8, 128)->Complexity(benchmark::oNSquared);

void BM_BaseOfParadigm(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto stem = word(rng, 8);
  std::vector<std::string> forms;
  for (int i = 0; i < state.range(0); ++i) forms.push_back(word(rng, 2) + stem + word(rng, 3));
  for (auto _ : state) benchmark::DoNotOptimize(pdp::base(forms));
}
BENCHMARK(BM_BaseOfParadigm)->DenseRange(2, 10, 4);

}  // namespace

BENCHMARK_MAIN();
