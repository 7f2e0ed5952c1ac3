#pragma once

// Subword skip-gram embeddings with negative sampling. A word's vector is
// the sum of the vectors of its character n-gram units.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pdp/ingest.hpp"

namespace pdp {

struct EmbeddingConfig {
  int ngram_min = 2;
  int ngram_max = 4;
  int window = 1;
  int dim = 100;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.05;
  std::size_t bucket_count = 2'000'000;
  std::size_t min_count = 1;
  double subsample = 0;
  std::uint64_t seed = 1;
  /// 1 = deterministic; >1 shards sentences over lock-free workers.
  int threads = 1;

  /// Short n-grams and a one-token window: biased towards affixes and syntax.
  static EmbeddingConfig biased();
  /// The n-gram range and window of the reference subword tool.
  static EmbeddingConfig standard();

  void validate() const;
  bool operator==(const EmbeddingConfig&) const = default;
};

/// Character n-grams of "<form>" with lengths in [ngram_min, ngram_max],
/// ordered by length then position, followed by the whole bracketed word.
/// The whole word appears once even when its length falls in range.
std::vector<std::string> extract_ngrams(std::string_view form, int ngram_min, int ngram_max);

class EmbeddingModel {
 public:
  /// Zero-initialised model over `vocab` (form, count) entries.
  EmbeddingModel(EmbeddingConfig config, std::vector<std::pair<std::string, std::size_t>> vocab);

  const EmbeddingConfig& config() const { return config_; }
  int dim() const { return config_.dim; }
  std::size_t vocab_size() const { return words_.size(); }
  const std::vector<std::pair<std::string, std::size_t>>& vocab() const { return words_; }
  std::optional<std::size_t> word_index(std::string_view form) const;

  /// Input-matrix rows summed to form `form`'s vector, one per unit of
  /// extract_ngrams(). The whole-word unit maps to the word's own row when
  /// `form` is in the vocabulary and to a hash bucket otherwise.
  std::vector<std::size_t> unit_rows(std::string_view form) const;

  std::vector<float> vector(std::string_view form) const;

  std::size_t input_rows() const { return words_.size() + config_.bucket_count; }
  std::span<float> input_row(std::size_t row);
  std::span<const float> input_row(std::size_t row) const;
  std::span<float> output_row(std::size_t word);
  std::span<const float> output_row(std::size_t word) const;

  /// Mean negative-sampling loss per positive pair, one entry per epoch.
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }

  /// Binary: header (magic, config, vocabulary), then the nonzero input rows
  /// as (index, little-endian float32 values), then the output matrix.
  void save(std::ostream& out) const;
  static EmbeddingModel load(std::istream& in);
  /// One "form v1 v2 ..." line per vocabulary word.
  void export_text(std::ostream& out) const;

  bool operator==(const EmbeddingModel&) const = default;

 private:
  friend EmbeddingModel train_embeddings(const Corpus&, const EmbeddingConfig&);

  EmbeddingConfig config_;
  std::vector<std::pair<std::string, std::size_t>> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> input_;
  std::vector<float> output_;
  std::vector<double> epoch_losses_;
};

/// Trains on every sentence of `corpus`. Vocabulary is sorted by descending
/// frequency then form, after dropping forms below min_count.
EmbeddingModel train_embeddings(const Corpus& corpus, const EmbeddingConfig& config);

double cosine(std::span<const float> a, std::span<const float> b);

/// Up to `n` candidates by descending cosine similarity to `form`, ties
/// broken lexicographically.
std::vector<std::string> nearest(const EmbeddingModel& model, std::string_view form,
                                 std::span<const std::string> candidates, std::size_t n);

}  // namespace pdp
