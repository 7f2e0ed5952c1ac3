#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pdp/error.hpp"
#include "pdp/metrics.hpp"
#include "random_grids.hpp"

using namespace pdp;
using fixture::lexicon_of;
using fixture::permuted;
using fixture::random_case;

namespace {

const FormScore& score_of(const PdpScores& s, const std::string& form) {
  const auto it = std::find_if(s.per_form.begin(), s.per_form.end(), [&](const auto& f) { return f.form == form; });
  REQUIRE(it != s.per_form.end());
  return *it;
}

}  // namespace

TEST_CASE("f-score conventions") {
  CHECK(f_score({"watching"}, {"watching"}) == 1.0);
  CHECK(f_score({}, {"seen"}) == 0.0);
  CHECK(f_score({"seen"}, {}) == 0.0);
  CHECK(f_score({}, {}) == 1.0);
  CHECK(f_score({"a", "b"}, {"b", "c"}) == doctest::Approx(0.5));
  CHECK(harmonic_mean(0, 0) == 0.0);
  CHECK(harmonic_mean(1, 0.5) == doctest::Approx(2.0 / 3));
}

TEST_CASE("toy grids score as worked by hand") {
  const auto lex = lexicon_of(oracle::toy_lexicon_forms());
  const auto s = pdp_scores(oracle::toy_prediction(), oracle::toy_gold_attested(), lex);
  CHECK(score_of(s, "watched").f_par == 1.0);
  CHECK(score_of(s, "see").f_par == 0.0);
  CHECK(score_of(s, "watched").f_cell == 1.0);
  CHECK(score_of(s, "see").f_cell == 0.0);
  CHECK(score_of(s, "seen").f_par == 0.0);
  CHECK(s.f_par == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(s.per_form.size() == 6);

  // With the syncretic past listed in both cells, watched also has seen as a
  // gold cell-mate.
  const auto full = pdp_scores(oracle::toy_prediction(), oracle::toy_gold_full(), lex);
  CHECK(score_of(full, "watched").f_cell == doctest::Approx(2.0 / 3));
  CHECK(full.f_par == doctest::Approx(2.0 / 3));
}

TEST_CASE("mates agree with an exhaustive scan") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 100; ++i) {
    const auto c = random_case(rng);
    const auto& lex = c.lexicon_forms;
    for (const auto& f : c.gold.forms()) {
      CHECK(mates(c.gold, f, MateMode::paradigm, c.lexicon) == oracle::mates(c.gold, f, true, lex));
      CHECK(mates(c.gold, f, MateMode::cell, c.lexicon) == oracle::mates(c.gold, f, false, lex));
    }
    CHECK(mates(c.gold, "absent-form", MateMode::cell, c.lexicon).empty());
  }
}

TEST_CASE("pdp scores average per-form oracle scores") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 100; ++i) {
    const auto c = random_case(rng);
    const auto& lex = c.lexicon_forms;
    const auto s = pdp_scores(c.predicted, c.gold, c.lexicon);
    double par = 0, cell = 0;
    std::size_t n = 0;
    for (const auto& f : lex) {
      par += oracle::f1(oracle::mates(c.predicted, f, true, lex), oracle::mates(c.gold, f, true, lex));
      cell += oracle::f1(oracle::mates(c.predicted, f, false, lex), oracle::mates(c.gold, f, false, lex));
      ++n;
    }
    CHECK(s.f_par == doctest::Approx(par / n));
    CHECK(s.f_cell == doctest::Approx(cell / n));
  }
  CHECK_THROWS_AS(pdp_scores(Grid{}, oracle::toy_gold_attested(), lexicon_of({"zzz"})), PipelineError);
}

TEST_CASE("metric properties on random grid pairs") {
  std::mt19937_64 rng(57);
  std::size_t with_analogies = 0;
  for (int i = 0; i < 200; ++i) {
    const auto c = random_case(rng);
    std::vector<AnalogyInstance> inst;
    try {
      inst = sample_analogies(c.gold, c.lexicon, 50, 3);
      ++with_analogies;
    } catch (const PipelineError&) {
    }
    const auto r = evaluate(c.predicted, c.gold, c.lexicon, inst);
    for (double v : {r.f_par, r.f_cell, r.f_grid, r.analogy, r.lexicon_expansion}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(r.lexicon_expansion >= r.analogy);

    const auto same = evaluate(c.gold, c.gold, c.lexicon, inst);
    CHECK(same.f_par == 1.0);
    CHECK(same.f_cell == 1.0);
    CHECK(same.f_grid == 1.0);
    if (!inst.empty()) {
      CHECK(same.analogy == 1.0);
      CHECK(same.lexicon_expansion == 1.0);
      CHECK(analogy_accuracy(inst, c.gold, true) == 1.0);
    }

    const auto p = evaluate(permuted(c.predicted, rng), c.gold, c.lexicon, inst);
    CHECK(p.f_par == doctest::Approx(r.f_par));
    CHECK(p.f_cell == doctest::Approx(r.f_cell));
    CHECK(p.analogy == r.analogy);
    CHECK(p.lexicon_expansion == r.lexicon_expansion);
  }
  CHECK(with_analogies > 50);
}

TEST_CASE("analogy sampler returns valid instances and the full set when asked for more") {
  std::mt19937_64 rng(59);
  std::size_t checked = 0;
  for (int i = 0; i < 200; ++i) {
    const auto c = random_case(rng);
    const auto& lex = c.lexicon_forms;
    const auto all = oracle::all_analogies(c.gold, lex);
    if (all.empty()) {
      CHECK_THROWS_AS(sample_analogies(c.gold, c.lexicon, 10, 1), PipelineError);
      continue;
    }
    const auto got = sample_analogies(c.gold, c.lexicon, all.size() + 5, 1);
    std::set<std::tuple<std::string, std::string, std::string, std::string>> tuples;
    for (const auto& x : got) {
      CHECK(valid_instance(x, c.gold, c.lexicon));
      tuples.emplace(x.f1, x.f2, x.f3, x.f4);
    }
    CHECK(tuples.size() == got.size());
    CHECK(tuples == all);

    const auto few = sample_analogies(c.gold, c.lexicon, 1, 9);
    CHECK(few.size() == 1);
    CHECK(all.count({few[0].f1, few[0].f2, few[0].f3, few[0].f4}));
    CHECK(sample_analogies(c.gold, c.lexicon, 3, 4) == sample_analogies(c.gold, c.lexicon, 3, 4));
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("analogies on the toy grids") {
  const auto gold = oracle::toy_gold_attested();
  const auto lex = lexicon_of(oracle::toy_lexicon_forms());
  const auto inst = sample_analogies(gold, lex, 100, 1);
  for (const auto& x : inst) CHECK(valid_instance(x, gold, lex));
  AnalogyInstance bad = inst.front();
  bad.f4 = bad.f3;
  CHECK_FALSE(valid_instance(bad, gold, lex));

  const auto pred = oracle::toy_prediction();
  const double acc = analogy_accuracy(inst, pred);
  CHECK(acc >= 0.0);
  CHECK(lexicon_expansion(inst, pred) >= acc);

  std::stringstream tsv;
  write_analogies_tsv(tsv, inst);
  CHECK(read_analogies_tsv(tsv, gold, lex) == inst);
  std::stringstream wrong("watch\tsee\tfollow\tsaw\n");
  CHECK_THROWS_AS(read_analogies_tsv(wrong, gold, lex), FormatError);
}

TEST_CASE("report json and table") {
  MetricsReport r;
  r.f_par = 0.5;
  r.f_cell = 0.25;
  r.f_grid = harmonic_mean(0.5, 0.25);
  r.analogy = 0.1;
  r.lexicon_expansion = 0.2;
  r.instances = 7;
  r.per_form = {{"a", 1.0, 0.0}};
  const auto back = MetricsReport::from_json(r.to_json());
  CHECK(back.f_par == r.f_par);
  CHECK(back.f_grid == r.f_grid);
  CHECK(back.instances == 7);
  REQUIRE(back.per_form.size() == 1);
  CHECK(back.per_form[0].f_par == 1.0);
  CHECK_THROWS_AS(MetricsReport::from_json("{"), FormatError);

  std::stringstream table;
  r.write_table(table);
  CHECK(table.str().find("F_grid") != std::string::npos);

  const std::vector<MetricsReport> two = {r, MetricsReport{}};
  CHECK(mean_report(two).f_par == 0.25);
}
