#pragma once

// Filling empty slots of clustered paradigms. A transducer maps a form from
// one cell to another; the built-in one rewrites exponents learned from
// within-paradigm pairs. Each target cell draws from the source cell that
// predicted it best on held-out paradigms.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdp/grid.hpp"
#include "pdp/paradigm_cluster.hpp"

namespace pdp {

struct ReinflectionInstance {
  int source_cell = 0;
  std::string source_form;
  int target_cell = 0;
  std::string target_form;  // empty at inference

  bool operator==(const ReinflectionInstance&) const = default;
};

struct PairSplit {
  std::vector<ReinflectionInstance> train;
  std::vector<ReinflectionInstance> dev;
};

/// Every ordered within-paradigm pair, split by paradigm: a shuffled tenth of
/// the multi-member paradigms (at least one, when there are two or more)
/// goes to dev. Throws PipelineError when no paradigm has two members.
PairSplit make_pairs(std::span<const Paradigm> paradigms, std::uint64_t seed, double dev_fraction = 0.1);

class Transducer {
 public:
  virtual ~Transducer() = default;
  virtual std::string predict(const std::string& source_form, int source_cell, int target_cell) const = 0;
};

struct RewriteRule {
  Exponent source;
  Exponent target;
  std::size_t count = 0;

  bool operator==(const RewriteRule&) const = default;
};

class RewriteModel : public Transducer {
 public:
  using CellPair = std::pair<int, int>;

  /// Rules per (source cell, target cell), by count descending then by
  /// exponent keys.
  std::map<CellPair, std::vector<RewriteRule>> rules;

  std::string predict(const std::string& source_form, int source_cell, int target_cell) const override;
  bool operator==(const RewriteModel& other) const { return rules == other.rules; }
};

RewriteModel train_rewriter(std::span<const ReinflectionInstance> train);

/// Splits `form` into (inferred base, ok) by removing `exponent`: edge
/// segments must be a prefix or suffix, internal ones must sit at their gap.
std::pair<std::u32string, bool> strip_exponent(std::u32string_view form, const Exponent& exponent);
/// Inserts `exponent` around `base`. Fails when an internal gap exceeds the base.
std::pair<std::u32string, bool> splice_exponent(std::u32string_view base, const Exponent& exponent);

/// Tries the cell pair's rules from the longest source exponent down (then by
/// count) and applies the first whose source exponent embeds in the form.
/// Copies the source form when no rule applies.
std::string apply(const RewriteModel& model, const std::string& source_form, int source_cell, int target_cell);

struct SourceRanking {
  /// target cell -> source cells, most reliable first.
  std::map<int, std::vector<int>> order;
  /// (source, target) -> exact-match accuracy on dev. Absent pairs are unseen.
  std::map<std::pair<int, int>, double> accuracy;

  bool operator==(const SourceRanking&) const = default;
};

/// Ranks, for every target in `cells`, every other cell in `cells` by dev
/// accuracy; pairs absent from dev rank last with accuracy 0, ties by id.
SourceRanking rank_sources(const Transducer& model, std::span<const ReinflectionInstance> dev,
                           std::span<const int> cells);

enum class SourceMode { ranked, random };

/// One row per paradigm with k columns labelled "0" .. "k-1". Attested forms
/// are copied; every other slot is predicted from the best attested source in
/// that paradigm (or a seeded random one in random mode).
Grid fill_grid(std::span<const Paradigm> paradigms, int k, const Transducer& model, const SourceRanking& ranking,
               SourceMode mode = SourceMode::ranked, std::uint64_t seed = 0);

/// "target\trank\tsource\taccuracy\tseen" rows.
void write_ranking_tsv(std::ostream& out, const SourceRanking& ranking);
/// "source_cell\ttarget_cell\tsource_exponent\ttarget_exponent\tcount" rows.
void write_rules_tsv(std::ostream& out, const RewriteModel& model);

}  // namespace pdp
