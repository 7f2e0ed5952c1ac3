#pragma once

// Greedy paradigm clustering over cell-assigned forms. Candidate paradigms
// are scored by how many characters their shared base (the longest common
// subsequence) explains versus how many are left over as exponents.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pdp/embeddings.hpp"

namespace pdp {

struct Member {
  int cell = 0;
  std::string form;

  bool operator==(const Member&) const = default;
};

/// Members in insertion order; cell ids are distinct within a paradigm.
using Paradigm = std::vector<Member>;

/// cell id -> forms clustered into it.
using CellSets = std::map<int, std::vector<std::string>>;

/// A run of form characters left over after removing the base.
struct ExponentSegment {
  std::u32string text;     // markers excluded
  int gap = 0;             // base characters preceding the segment
  bool word_start = false;  // rendered with a leading '<'
  bool word_end = false;    // rendered with a trailing '>'

  auto operator<=>(const ExponentSegment&) const = default;
};

/// The tuple of affixes a form adds to its paradigm's base.
struct Exponent {
  std::vector<ExponentSegment> segments;

  /// Exponent characters; boundary markers do not count.
  std::size_t length() const;
  /// Identity used for counting. Edge segments are identified by their
  /// markers, word-internal segments also by their gap: "<ge|t@2|en>".
  std::string key() const;
  /// Human-readable tuple: "(<w, y, z>)".
  std::string display() const;

  auto operator<=>(const Exponent&) const = default;
};

struct BaseExponent {
  std::u32string base;
  std::vector<Exponent> exponents;  // parallel to the input forms

  std::string base_utf8() const;
};

/// A longest common subsequence by dynamic programming. The backtrace
/// prefers the diagonal, then up, then left.
std::u32string lcs_pair(std::u32string_view a, std::u32string_view b);
std::string lcs_pair(std::string_view a, std::string_view b);

/// Residual segments of `form` after a greedy leftmost embedding of `base`.
/// Throws std::invalid_argument if `base` is not a subsequence of `form`.
Exponent exponent_of(std::u32string_view form, std::u32string_view base);

/// Base = pairwise LCS folded over the forms sorted shortest first.
BaseExponent base(std::span<const std::string> forms);

/// Sum over members of |base| - |exponent|. May be negative.
long score(const Paradigm& paradigm);

/// Sum over members of |base| - |exponent| * omega(exponent, cell).
double score_weighted(const Paradigm& paradigm, const std::function<double(const Exponent&, int)>& omega);

/// Unsmoothed p(exponent | cell) from a completed clustering pass.
struct ExponentDistribution {
  std::map<int, std::map<std::string, double>> prob;  // cell -> exponent key -> p
  std::map<int, std::string> argmax;                  // cell -> most likely exponent key
  std::map<std::string, std::string> display;         // exponent key -> display form

  double p(int cell, const std::string& key) const;
  /// Recomputes `argmax` from `prob`; ties go to the smaller key.
  void refresh_argmax();
};

ExponentDistribution exponent_distribution(std::span<const Paradigm> paradigms);

/// 0 for the cell's most likely exponent, otherwise 2 - p(x|c) / max p(.|c).
/// Unseen exponents and unseen cells get 2.
double penalty(const std::string& exponent_key, int cell, const ExponentDistribution& dist);

double score_penalized(const Paradigm& paradigm, const ExponentDistribution& dist);

using ScoreFn = std::function<double(const Paradigm&)>;

/// Restricts the forms a seed may recruit from a later cell.
class CandidateIndex {
 public:
  virtual ~CandidateIndex() = default;
  /// Up to `n` members of `cell` ranked for `form`, best first.
  virtual std::vector<std::string> candidates(const std::string& form, int cell, std::size_t n) const = 0;
};

/// Nearest neighbours in an embedding space. Lists are computed over the
/// full cells once and reused; not safe for concurrent queries.
class EmbeddingCandidateIndex : public CandidateIndex {
 public:
  EmbeddingCandidateIndex(const EmbeddingModel& model, const CellSets& cells);
  std::vector<std::string> candidates(const std::string& form, int cell, std::size_t n) const override;

 private:
  const std::vector<float>& unit_vector(const std::string& form) const;

  const EmbeddingModel& model_;
  CellSets cells_;
  mutable std::unordered_map<std::string, std::vector<float>> vectors_;
  mutable std::map<std::pair<std::string, int>, std::vector<std::string>> lists_;
};

/// One greedy pass: cells in descending size order (ties by id), seeds in
/// lexicographic order; each seed recruits the best-scoring form from every
/// later cell while the score strictly improves. With no index every
/// remaining form of the later cell is a candidate.
std::vector<Paradigm> cluster_pass(const CellSets& cells, const ScoreFn& score_fn, const CandidateIndex* index,
                                   std::size_t n);

enum class OmegaMode { heuristic, const1, const0 };

struct ParadigmConfig {
  OmegaMode omega = OmegaMode::heuristic;
  bool single_pass = false;
  std::size_t neighbors = 250;
};

struct ParadigmResult {
  std::vector<Paradigm> first_pass;
  ExponentDistribution distribution;
  std::vector<Paradigm> paradigms;  // final output
};

/// First pass with the plain score, then a fresh pass with the penalised
/// score built from the first pass's exponent distribution.
ParadigmResult cluster_paradigms(const CellSets& cells, const CandidateIndex* index, const ParadigmConfig& config);

/// {"paradigm_id": 0, "members": [{"cell": 1, "form": "watched"}]}
void write_paradigms_jsonl(std::ostream& out, std::span<const Paradigm> paradigms);
std::vector<Paradigm> read_paradigms_jsonl(std::istream& in);
/// "cell\texponent\tp" rows.
void write_exponents_tsv(std::ostream& out, const ExponentDistribution& dist);

}  // namespace pdp
