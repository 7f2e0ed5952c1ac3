#include <benchmark/benchmark.h>

#include <string>

#include "pdp/metrics.hpp"
#include "pdp/synthetic.hpp"

namespace {

struct Fixture {
  pdp::Grid gold;
  pdp::Lexicon lexicon;
};

Fixture synthetic(int stems) {
  pdp::SyntheticConfig sc;
  sc.stems = stems;
  sc.cells = 6;
  const auto lang = pdp::make_language(sc);
  Fixture f;
  for (std::size_t s = 0; s < lang.stems.size(); ++s) {
    pdp::GridRow row;
    for (std::size_t c = 0; c < lang.suffixes.size(); ++c) {
      row.slots[lang.cell_labels[c]] = pdp::Slot{{lang.form(s, c)}, false};
      if (lang.attested[s][c]) f.lexicon.entries[lang.form(s, c)] = 1;
    }
    f.gold.rows.push_back(row);
  }
  return f;
}

void BM_PdpScores(benchmark::State& state) {
  const auto f = synthetic(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pdp::pdp_scores(f.gold, f.gold, f.lexicon).f_grid);
}
BENCHMARK(BM_PdpScores)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SampleAnalogies(benchmark::State& state) {
  const auto f = synthetic(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pdp::sample_analogies(f.gold, f.lexicon, 2000, 1).size());
}
BENCHMARK(BM_SampleAnalogies)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_AnalogyAccuracy(benchmark::State& state) {
  const auto f = synthetic(400);
  const auto inst = pdp::sample_analogies(f.gold, f.lexicon, 2000, 1);
  const bool joint = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(pdp::analogy_accuracy(inst, f.gold, joint));
}
BENCHMARK(BM_AnalogyAccuracy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
