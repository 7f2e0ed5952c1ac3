#include <benchmark/benchmark.h>

#include <algorithm>

#include "pdp/paradigm_cluster.hpp"
#include "pdp/synthetic.hpp"

namespace {

pdp::CellSets synthetic_cells(int stems) {
  pdp::SyntheticConfig sc;
  sc.stems = stems;
  sc.cells = 4;
  const auto lang = pdp::make_language(sc);
  pdp::CellSets cells;
  for (std::size_t s = 0; s < lang.stems.size(); ++s)
    for (std::size_t c = 0; c < lang.suffixes.size(); ++c)
      if (lang.attested[s][c]) cells[static_cast<int>(c)].push_back(lang.form(s, c));
  for (auto& [c, forms] : cells) std::sort(forms.begin(), forms.end());
  return cells;
}

void BM_ClusterParadigms(benchmark::State& state) {
  const auto cells = synthetic_cells(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(pdp::cluster_paradigms(cells, nullptr, pdp::ParadigmConfig{}).paradigms.size());
}
BENCHMARK(BM_ClusterParadigms)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
