// pdp: paradigm discovery pipeline driver.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "pdp/error.hpp"
#include "pdp/pipeline.hpp"
#include "pdp/synthetic.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitFormat = 3;
constexpr int kExitPipeline = 4;

struct Overrides {
  std::string config;
  std::string raw_text, annotations, tables, pos, output;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, repeats, gold_k, k_max, restarts, epochs, dim;
  std::optional<std::size_t> neighbors, analogies;
  std::string omega, sources;
  bool single_pass = false, no_affix_bias = false, no_window_bias = false, joint_analogy = false;
  bool strip_diacritics = false, case_fold = false, lowercase = false;
  bool verbose = false, quiet = false;
};

void add_pipeline_options(CLI::App& app, Overrides& o) {
  app.add_option("-c,--config", o.config, "JSON configuration file");
  app.add_option("--raw", o.raw_text, "raw text corpus, one sentence per line");
  app.add_option("--annotations", o.annotations, "annotated corpus in CoNLL-U");
  app.add_option("--tables", o.tables, "inflection tables: lemma<TAB>form<TAB>cell");
  app.add_option("--pos", o.pos, "UPOS tag of the lexicon");
  app.add_option("-o,--output", o.output, "output directory");
  app.add_option("--seed", o.seed, "master random seed");
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--repeats", o.repeats, "independent runs with seeds seed..seed+R-1")->check(CLI::PositiveNumber);
  app.add_option("--gold-k", o.gold_k, "fix the number of cells instead of picking it")->check(CLI::PositiveNumber);
  app.add_option("--k-max", o.k_max, "largest k tried by the elbow rule")->check(CLI::Range(3, 100000));
  app.add_option("--restarts", o.restarts, "k-means restarts per k")->check(CLI::PositiveNumber);
  app.add_option("--epochs", o.epochs, "embedding epochs (both models)")->check(CLI::PositiveNumber);
  app.add_option("--dim", o.dim, "embedding dimension (both models)")->check(CLI::PositiveNumber);
  app.add_option("--neighbors", o.neighbors, "candidate forms per cell during paradigm clustering")
      ->check(CLI::PositiveNumber);
  app.add_option("--omega", o.omega, "exponent penalty in the second pass")
      ->check(CLI::IsMember({"heuristic", "const1", "const0"}));
  app.add_flag("--single-pass", o.single_pass, "skip the penalised second pass");
  app.add_option("--sources", o.sources, "source cell choice when filling slots")
      ->check(CLI::IsMember({"ranked", "random"}));
  app.add_flag("--no-affix-bias", o.no_affix_bias, "biased embeddings use the default n-gram range");
  app.add_flag("--no-window-bias", o.no_window_bias, "biased embeddings use the default window");
  app.add_option("--analogies", o.analogies, "analogy instances to sample")->check(CLI::PositiveNumber);
  app.add_flag("--joint-analogy", o.joint_analogy, "require one consistent row/column choice per analogy");
  app.add_flag("--strip-diacritics", o.strip_diacritics, "remove combining marks from forms");
  app.add_flag("--case-fold", o.case_fold, "case-fold forms");
  app.add_flag("--lowercase", o.lowercase, "lowercase raw text tokens");
  app.add_flag("-v,--verbose", o.verbose, "debug logging");
  app.add_flag("-q,--quiet", o.quiet, "warnings and errors only");
}

pdp::PipelineConfig resolve_config(const Overrides& o) {
  auto c = o.config.empty() ? pdp::PipelineConfig{} : pdp::load_config(o.config);
  if (!o.raw_text.empty()) c.raw_text = o.raw_text;
  if (!o.annotations.empty()) c.annotations = o.annotations;
  if (!o.tables.empty()) c.tables = o.tables;
  if (!o.pos.empty()) c.pos = o.pos;
  if (!o.output.empty()) c.output = o.output;
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.repeats) c.repeats = *o.repeats;
  if (o.gold_k) c.cells.gold_k = *o.gold_k;
  if (o.k_max) c.cells.k_max = *o.k_max;
  if (o.restarts) c.cells.restarts = *o.restarts;
  if (o.epochs) c.biased.epochs = c.standard.epochs = *o.epochs;
  if (o.dim) c.biased.dim = c.standard.dim = *o.dim;
  if (o.neighbors) c.paradigms.neighbors = *o.neighbors;
  if (o.analogies) c.analogies = *o.analogies;
  if (o.omega == "heuristic") c.paradigms.omega = pdp::OmegaMode::heuristic;
  if (o.omega == "const1") c.paradigms.omega = pdp::OmegaMode::const1;
  if (o.omega == "const0") c.paradigms.omega = pdp::OmegaMode::const0;
  if (o.single_pass) c.paradigms.single_pass = true;
  if (o.sources == "ranked") c.sources = pdp::SourceMode::ranked;
  if (o.sources == "random") c.sources = pdp::SourceMode::random;
  if (o.no_affix_bias) c.no_affix_bias = true;
  if (o.no_window_bias) c.no_window_bias = true;
  if (o.joint_analogy) c.joint_analogy = true;
  if (o.strip_diacritics) c.normalize.strip_diacritics = true;
  if (o.case_fold) c.normalize.case_fold = true;
  if (o.lowercase) c.tokenize.lowercase = true;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paradigm discovery: cluster word forms into cells and paradigms, fill the gaps, evaluate."};
  app.require_subcommand(1);
  Overrides o;

  std::vector<std::pair<pdp::Stage, CLI::App*>> stage_commands;
  const std::pair<pdp::Stage, const char*> stages[] = {
      {pdp::Stage::ingest, "build corpus, lexicon and gold grid"},
      {pdp::Stage::embed, "train the biased and default embeddings"},
      {pdp::Stage::cells, "cluster lexicon forms into cells"},
      {pdp::Stage::paradigms, "cluster cell members into paradigms"},
      {pdp::Stage::reinflect, "fill empty slots of the discovered paradigms"},
      {pdp::Stage::evaluate, "score the predicted grid against the gold grid"},
  };
  for (const auto& [stage, help] : stages) {
    auto* cmd = app.add_subcommand(pdp::stage_name(stage), help);
    add_pipeline_options(*cmd, o);
    stage_commands.emplace_back(stage, cmd);
  }
  auto* run_all = app.add_subcommand("run-all", "run every stage and write the run manifest");
  add_pipeline_options(*run_all, o);

  auto* fixtures = app.add_subcommand("make-fixtures", "write the synthetic language or the toy English example");
  std::string kind = "synthetic";
  std::string fixture_dir;
  pdp::SyntheticConfig synthetic;
  fixtures->add_option("kind", kind, "synthetic or toy")->check(CLI::IsMember({"synthetic", "toy"}));
  fixtures->add_option("-d,--dir", fixture_dir, "destination directory")->required();
  fixtures->add_option("--stems", synthetic.stems, "synthetic stems")->check(CLI::Range(2, 100000));
  fixtures->add_option("--cells", synthetic.cells, "synthetic cells")->check(CLI::Range(2, 8));
  fixtures->add_option("--tokens", synthetic.tokens, "synthetic corpus size in tokens");
  fixtures->add_option("--seed", synthetic.seed, "generator seed");
  fixtures->add_flag("-v,--verbose", o.verbose, "debug logging");
  fixtures->add_flag("-q,--quiet", o.quiet, "warnings and errors only");

  CLI11_PARSE(app, argc, argv);

  spdlog::set_default_logger(spdlog::stderr_color_mt("pdp"));
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(o.verbose ? spdlog::level::debug : o.quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (fixtures->parsed()) {
      const auto files = kind == "toy" ? pdp::write_toy_fixture(fixture_dir)
                                       : pdp::write_synthetic_fixture(fixture_dir, synthetic);
      std::cout << files.config.string() << '\n';
      return 0;
    }
    const auto config = resolve_config(o);
    if (run_all->parsed()) {
      const auto results = pdp::run_all(config);
      if (results.size() == 1) {
        results.front().report.write_table(std::cout);
      } else {
        std::vector<pdp::MetricsReport> reports;
        for (const auto& r : results) reports.push_back(r.report);
        std::cout << "mean over " << reports.size() << " runs\n";
        pdp::mean_report(reports).write_table(std::cout);
      }
      return 0;
    }
    for (const auto& [stage, cmd] : stage_commands) {
      if (!cmd->parsed()) continue;
      const auto record = pdp::run_stage(stage, config);
      for (const auto& [file, hash] : record.outputs)
        std::cout << (config.output / file).string() << '\t' << hash << '\n';
    }
    return 0;
  } catch (const pdp::InputError& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const pdp::FormatError& e) {
    spdlog::error("{}", e.what());
    return kExitFormat;
  } catch (const pdp::PipelineError& e) {
    spdlog::error("{}", e.what());
    return kExitPipeline;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
