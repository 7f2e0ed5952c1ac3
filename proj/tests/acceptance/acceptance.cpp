// Acceptance suite: one PASS/FAIL line per criterion. Usage: pdp_acceptance WORK_DIR

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "oracles.hpp"
#include "pdp/cell_cluster.hpp"
#include "pdp/error.hpp"
#include "pdp/metrics.hpp"
#include "pdp/paradigm_cluster.hpp"
#include "pdp/pipeline.hpp"
#include "pdp/synthetic.hpp"
#include "random_grids.hpp"

namespace fs = std::filesystem;
using namespace pdp;

namespace {

// Time budgets in seconds.
constexpr double kBudgetWorked = 1.0;
constexpr double kBudgetToyMetrics = 1.0;
constexpr double kBudgetLcs = 30.0;
constexpr double kBudgetElbow = 5.0;
constexpr double kBudgetMetricProps = 30.0;
constexpr double kBudgetSynthetic = 600.0;

// Numeric tolerances.
constexpr double kToyAggregateTol = 1e-9;
constexpr double kDecelTol = 1e-12;
constexpr double kPermutationTol = 1e-12;

// Synthetic end-to-end thresholds.
constexpr double kMinGridF = 0.9;
constexpr double kMinLexiconExpansion = 0.8;

// Sample sizes.
constexpr int kLcsPairs = 10'000;
constexpr int kDecelCurves = 1'000;
constexpr int kOmegaDistributions = 10'000;
constexpr int kOmegaParadigms = 1'000;
constexpr int kMetricGridPairs = 200;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failures_++ < 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failed check(s): " + notes_};
  }

 private:
  int failures_ = 0;
  std::string notes_;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string random_word(std::mt19937_64& rng, std::size_t max_len, const std::string& alphabet) {
  std::string s;
  const auto len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
  return s;
}

Outcome worked_examples() {
  Check c;
  const long s7 = score({{0, "watched"}});
  const long s5 = score({{0, "watched"}, {1, "watching"}});
  const Paradigm pair{{0, "watched"}, {1, "watching"}};
  const auto dist = exponent_distribution(std::vector<Paradigm>{pair});
  const double s10 = score_penalized(pair, dist);
  c.require(s7 == 7, "score([watched]) = " + std::to_string(s7));
  c.require(s5 == 5, "score([watched, watching]) = " + std::to_string(s5));
  c.require(s10 == 10.0, "penalised score = " + num(s10));
  const std::vector<std::string> forms = {"wxyxz", "axx"};
  const auto be = base(forms);
  c.require(be.base_utf8() == "xx", "base = " + be.base_utf8());
  c.require(be.exponents[0].display() == "(<w, y, z>)", "exponent of wxyxz = " + be.exponents[0].display());
  c.require(be.exponents[1].display() == "(<a)", "exponent of axx = " + be.exponents[1].display());
  return c.outcome("scores 7/5/10, base xx with (<w, y, z>) and (<a)");
}

Outcome toy_metrics() {
  Check c;
  const auto lex = fixture::lexicon_of(oracle::toy_lexicon_forms());
  const auto s = pdp_scores(oracle::toy_prediction(), oracle::toy_gold_attested(), lex);
  auto per = [&](const std::string& form) -> const FormScore& {
    for (const auto& f : s.per_form)
      if (f.form == form) return f;
    throw std::runtime_error("no score for " + form);
  };
  c.require(per("watched").f_par == 1.0, "watched F_par");
  c.require(per("see").f_par == 0.0, "see F_par");
  c.require(per("watched").f_cell == 1.0, "watched F_cell");
  c.require(per("see").f_cell == 0.0, "see F_cell");
  c.require(std::abs(s.f_par - 2.0 / 3.0) <= kToyAggregateTol, "F_par = " + num(s.f_par));
  return c.outcome("F_par = " + num(s.f_par));
}

Outcome lcs_oracle() {
  Check c;
  std::mt19937_64 rng(2024);
  for (int i = 0; i < kLcsPairs; ++i) {
    const auto a = random_word(rng, 8, "abc");
    const auto b = random_word(rng, 8, "abc");
    const auto l = lcs_pair(a, b);
    const auto want = oracle::brute_lcs_length(a, b);
    c.require(l.size() == want && oracle::is_subsequence(l, a) && oracle::is_subsequence(l, b),
              "lcs(" + a + ", " + b + ") = " + l);
  }
  return c.outcome(std::to_string(kLcsPairs) + " pairs agree");
}

Outcome elbow_rule() {
  Check c;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  double worst = 0;
  for (int i = 0; i < kDecelCurves; ++i) {
    DispersionCurve curve;
    std::vector<double> d;
    const int len = 4 + static_cast<int>(rng() % 20);
    for (int k = 1; k <= len; ++k) {
      d.push_back(u(rng));
      curve[k] = d.back();
    }
    for (int k = 2; k < len; ++k) {
      const double diff = std::abs(decel(curve, k) - oracle::second_difference(d, k));
      worst = std::max(worst, diff);
      c.require(diff <= kDecelTol, "decel mismatch " + num(diff));
    }
  }
  const std::vector<double> worked = {100, 60, 40, 34, 31};
  const auto r = select_k([&](int k) { return worked.at(static_cast<std::size_t>(k - 1)); }, 4);
  c.require(r.k == 4, "worked curve selects k = " + std::to_string(r.k));
  return c.outcome("max |decel - oracle| = " + num(worst) + ", worked curve k = " + std::to_string(r.k));
}

Outcome omega_identities(const fs::path& work) {
  Check c;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < kOmegaDistributions; ++i) {
    ExponentDistribution dist;
    const auto n = 1 + rng() % 8;
    double total = 0;
    for (std::size_t j = 0; j < n; ++j) total += dist.prob[0]["x" + std::to_string(j)] = u(rng) + 1e-9;
    for (auto& [key, p] : dist.prob[0]) p /= total;
    dist.refresh_argmax();
    for (std::size_t j = 0; j <= n; ++j) {
      const double w = penalty("x" + std::to_string(j), 0, dist);
      c.require(w == 0.0 || (w >= 1.0 && w <= 2.0), "omega = " + num(w));
    }
  }
  for (int i = 0; i < kOmegaParadigms; ++i) {
    Paradigm p;
    const auto m = 1 + rng() % 6;
    for (std::size_t j = 0; j < m; ++j) p.push_back({static_cast<int>(j), random_word(rng, 10, "abcde")});
    c.require(score_weighted(p, [](const Exponent&, int) { return 1.0; }) == static_cast<double>(score(p)),
              "constant-one score differs");
  }

  // End to end: the constant-one second pass reproduces the single pass.
  SyntheticConfig sc;
  const auto files = write_synthetic_fixture(work / "omega_fixture", sc);
  auto one = load_config(files.config);
  one.cells.gold_k = sc.cells;
  one.paradigms.omega = OmegaMode::const1;
  one.output = work / "omega_const1";
  auto single = one;
  single.paradigms.omega = OmegaMode::heuristic;
  single.paradigms.single_pass = true;
  single.output = work / "omega_single";
  for (const auto* cfg : {&one, &single}) {
    fs::remove_all(cfg->output);
    for (const auto stage : {Stage::ingest, Stage::embed, Stage::cells, Stage::paradigms}) run_stage(stage, *cfg);
  }
  const auto a = slurp(one.output / artifact::paradigms);
  const auto b = slurp(single.output / artifact::paradigms);
  c.require(!a.empty() && a == b, "const-1 and single-pass paradigms differ");
  return c.outcome("omega in {0} u [1,2]; const-1 equals single pass (" +
                   std::to_string(std::count(a.begin(), a.end(), '\n')) + " paradigms)");
}

Outcome metric_properties() {
  Check c;
  std::mt19937_64 rng(4242);
  std::size_t with_instances = 0;
  for (int i = 0; i < kMetricGridPairs; ++i) {
    const auto g = fixture::random_case(rng);
    std::vector<AnalogyInstance> inst;
    try {
      inst = sample_analogies(g.gold, g.lexicon, 100, 5);
      ++with_instances;
    } catch (const PipelineError&) {
    }
    const auto r = evaluate(g.predicted, g.gold, g.lexicon, inst);
    for (const double v : {r.f_cell, r.f_par, r.f_grid, r.analogy, r.lexicon_expansion})
      c.require(v >= 0.0 && v <= 1.0, "metric out of range: " + num(v));
    c.require(r.lexicon_expansion >= r.analogy, "LE < Analogy");

    const auto id = evaluate(g.gold, g.gold, g.lexicon, inst);
    c.require(id.f_cell == 1.0 && id.f_par == 1.0 && id.f_grid == 1.0, "identity PDP scores below 1");
    if (!inst.empty())
      c.require(id.analogy == 1.0 && id.lexicon_expansion == 1.0, "identity analogy scores below 1");

    const auto p = evaluate(fixture::permuted(g.predicted, rng), g.gold, g.lexicon, inst);
    c.require(std::abs(p.f_cell - r.f_cell) <= kPermutationTol && std::abs(p.f_par - r.f_par) <= kPermutationTol &&
                  std::abs(p.f_grid - r.f_grid) <= kPermutationTol && p.analogy == r.analogy &&
                  p.lexicon_expansion == r.lexicon_expansion,
              "permutation changed a metric");
  }
  c.require(with_instances > 0, "no grid pair had analogy instances");
  return c.outcome(std::to_string(kMetricGridPairs) + " grid pairs, " + std::to_string(with_instances) +
                   " with analogies");
}

PipelineConfig synthetic_config(const fs::path& work, const std::string& run) {
  SyntheticConfig sc;
  const auto files = write_synthetic_fixture(work / "synthetic", sc);
  auto cfg = load_config(files.config);
  cfg.cells.gold_k = sc.cells;
  cfg.threads = 1;
  cfg.output = work / run;
  fs::remove_all(cfg.output);
  return cfg;
}

Outcome synthetic_end_to_end(const fs::path& work) {
  const auto cfg = synthetic_config(work, "synthetic_a");
  const auto results = run_all(cfg);
  const auto& r = results.front().report;
  Check c;
  c.require(r.f_grid >= kMinGridF, "F_grid = " + num(r.f_grid));
  c.require(r.lexicon_expansion >= kMinLexiconExpansion, "LE = " + num(r.lexicon_expansion));
  return c.outcome("F_grid = " + num(r.f_grid) + ", LE = " + num(r.lexicon_expansion) + ", F_par = " +
                   num(r.f_par) + ", F_cell = " + num(r.f_cell) + ", Analogy = " + num(r.analogy));
}

Outcome determinism(const fs::path& work) {
  Check c;
  const auto a = synthetic_config(work, "determinism_a");
  const auto b = synthetic_config(work, "determinism_b");
  run_all(a);
  run_all(b);
  std::size_t compared = 0;
  for (const auto* name : {artifact::gold_grid, artifact::cells, artifact::paradigms, artifact::predicted_grid,
                           artifact::analogies, artifact::metrics_json, artifact::metrics_text}) {
    c.require(slurp(a.output / name) == slurp(b.output / name), std::string(name) + " differs");
    ++compared;
  }
  return c.outcome(std::to_string(compared) + " artifacts byte-identical");
}

Outcome analogy_sampler(const fs::path& work) {
  Check c;
  std::mt19937_64 rng(5150);
  std::size_t grids = 0, instances = 0;
  auto check_grid = [&](const Grid& gold, const Lexicon& lexicon, const std::set<std::string>& forms) {
    const auto all = oracle::all_analogies(gold, forms);
    if (all.empty()) return;
    const auto got = sample_analogies(gold, lexicon, all.size() + 10, 3);
    std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
    for (const auto& x : got) {
      c.require(valid_instance(x, gold, lexicon), "invalid instance " + x.f1 + ":" + x.f2 + "::" + x.f3 + ":" + x.f4);
      seen.emplace(x.f1, x.f2, x.f3, x.f4);
    }
    c.require(seen.size() == got.size() && seen == all,
              "returned " + std::to_string(got.size()) + " of " + std::to_string(all.size()) + " instances");
    const auto some = sample_analogies(gold, lexicon, std::max<std::size_t>(1, all.size() / 2), 4);
    for (const auto& x : some) c.require(valid_instance(x, gold, lexicon), "invalid sampled instance");
    ++grids;
    instances += got.size();
  };
  for (int i = 0; i < 200; ++i) {
    const auto g = fixture::random_case(rng);
    check_grid(g.gold, g.lexicon, g.lexicon_forms);
  }
  // The synthetic gold grid from the end-to-end run.
  const auto dir = work / "synthetic_a";
  if (fs::exists(dir / artifact::gold_grid)) {
    std::ifstream gin(dir / artifact::gold_grid), lin(dir / artifact::lexicon);
    const auto gold = read_grid_jsonl(gin);
    const auto lex = read_lexicon_jsonl(lin);
    std::set<std::string> forms;
    for (const auto& [f, n] : lex.entries) forms.insert(f);
    check_grid(gold, lex, forms);
  }
  c.require(grids > 0, "no grid had instances");
  return c.outcome(std::to_string(grids) + " grids, " + std::to_string(instances) + " instances checked");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: pdp_acceptance WORK_DIR\n";
    return 2;
  }
  const fs::path work = fs::absolute(argv[1]);
  fs::create_directories(work);
  spdlog::set_level(spdlog::level::err);

  struct Criterion {
    int id;
    std::string name;
    double budget;  // seconds; 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "worked scores and bases", kBudgetWorked, worked_examples},
      {2, "toy metric fixture", kBudgetToyMetrics, toy_metrics},
      {3, "LCS matches exhaustive oracle", kBudgetLcs, lcs_oracle},
      {4, "deceleration and elbow rule", kBudgetElbow, elbow_rule},
      {5, "exponent penalty identities", 0, [&] { return omega_identities(work); }},
      {6, "metric properties", kBudgetMetricProps, metric_properties},
      {7, "synthetic end-to-end", kBudgetSynthetic, [&] { return synthetic_end_to_end(work); }},
      {8, "determinism", 0, [&] { return determinism(work); }},
      {9, "analogy sampler", 0, [&] { return analogy_sampler(work); }},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget > 0 && secs > cr.budget) {
      o.pass = false;
      o.detail += "; over time budget of " + num(cr.budget) + " s";
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d %s: %s (%s) [%.3f s]\n", cr.id, o.pass ? "PASS" : "FAIL", cr.name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
