#pragma once

// Stage orchestration: configuration, artifact layout, content-hash caching
// and the run manifest.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pdp/cell_cluster.hpp"
#include "pdp/embeddings.hpp"
#include "pdp/ingest.hpp"
#include "pdp/metrics.hpp"
#include "pdp/paradigm_cluster.hpp"
#include "pdp/reinflect.hpp"

namespace pdp {

struct PipelineConfig {
  // Inputs. Any of them may be empty, but ingest needs annotations and tables.
  std::filesystem::path raw_text;
  std::filesystem::path annotations;
  std::filesystem::path tables;
  std::string pos = "VERB";
  NormalizeConfig normalize;
  TokenizeConfig tokenize;

  EmbeddingConfig biased = EmbeddingConfig::biased();
  EmbeddingConfig standard = EmbeddingConfig::standard();
  /// Ablations: give the biased model the standard n-gram range / window.
  bool no_affix_bias = false;
  bool no_window_bias = false;

  CellClusterConfig cells;
  ParadigmConfig paradigms;

  SourceMode sources = SourceMode::ranked;
  double dev_fraction = 0.1;

  std::size_t analogies = 2000;
  bool joint_analogy = false;
  /// Seed for analogy sampling; defaults to `seed`. Repeats share it.
  std::optional<std::uint64_t> analogy_seed;

  std::uint64_t seed = 1;
  int threads = 1;
  int repeats = 1;
  std::filesystem::path output = "out";

  /// The biased preset after ablations, seeded from `seed`.
  EmbeddingConfig effective_biased() const;
  EmbeddingConfig effective_standard() const;
};

/// Parses a JSON document; missing keys keep their defaults. Relative input
/// and output paths are resolved against `base_dir`.
PipelineConfig config_from_json(const std::string& text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

enum class Stage { ingest, embed, cells, paradigms, reinflect, evaluate };

const std::vector<Stage>& all_stages();
std::string stage_name(Stage stage);
std::optional<Stage> parse_stage(const std::string& name);

/// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* corpus = "corpus.jsonl";
inline constexpr const char* lexicon = "lexicon.jsonl";
inline constexpr const char* gold_grid = "gold_grid.jsonl";
inline constexpr const char* biased_model = "biased.bin";
inline constexpr const char* standard_model = "default.bin";
inline constexpr const char* cells = "cells.tsv";
inline constexpr const char* dispersion = "dispersion.csv";
inline constexpr const char* first_pass = "first_pass.jsonl";
inline constexpr const char* paradigms = "paradigms.jsonl";
inline constexpr const char* exponents = "exponents.tsv";
inline constexpr const char* predicted_grid = "predicted_grid.jsonl";
inline constexpr const char* source_ranking = "source_ranking.tsv";
inline constexpr const char* rules = "rules.tsv";
inline constexpr const char* analogies = "analogies.tsv";
inline constexpr const char* metrics_json = "metrics.json";
inline constexpr const char* metrics_text = "metrics.txt";
inline constexpr const char* manifest = "manifest.json";
}  // namespace artifact

struct StageRecord {
  Stage stage = Stage::ingest;
  std::string key;                                          // hex cache key
  std::vector<std::pair<std::string, std::string>> outputs;  // file, hex hash
  double seconds = 0;
  bool cached = false;
};

/// Runs one stage in `config.output`. A stage whose stamp matches the hash
/// of its inputs and configuration is skipped. When a stage recomputes, the
/// outputs and stamps of every later stage are removed. Throws InputError
/// naming the producing stage when an upstream artifact is missing.
StageRecord run_stage(Stage stage, const PipelineConfig& config);

struct RunResult {
  std::vector<StageRecord> stages;
  MetricsReport report;
};

/// Every stage in order, then manifest.json. With `repeats` > 1, run i goes
/// to output/run_i with seed + i, and output/metrics.json holds every run's
/// metrics and their mean.
std::vector<RunResult> run_all(const PipelineConfig& config);

}  // namespace pdp
