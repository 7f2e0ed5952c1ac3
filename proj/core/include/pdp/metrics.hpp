#pragma once

// Grid evaluation. Clustering quality is scored per lexicon form by how well
// its predicted paradigm-mates and cell-mates retrieve the gold ones; slot
// filling is scored on four-way analogies sampled from the gold grid.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pdp/grid.hpp"
#include "pdp/ingest.hpp"

namespace pdp {

enum class MateMode { paradigm, cell };

/// Lexicon forms other than `form` sharing a row (paradigm mode) or a column
/// (cell mode) with any occurrence of `form`. Empty if `form` is absent.
std::set<std::string> mates(const Grid& grid, const std::string& form, MateMode mode, const Lexicon& lexicon);

/// Set-retrieval F1. Both empty scores 1, exactly one empty scores 0.
double f_score(const std::set<std::string>& predicted, const std::set<std::string>& gold);

double harmonic_mean(double a, double b);

struct FormScore {
  std::string form;
  double f_par = 0;
  double f_cell = 0;
};

struct PdpScores {
  double f_par = 0;
  double f_cell = 0;
  double f_grid = 0;
  std::vector<FormScore> per_form;  // sorted by form
};

/// Macro-averages over lexicon forms that occur in the gold grid. Throws
/// PipelineError if there are none.
PdpScores pdp_scores(const Grid& predicted, const Grid& gold, const Lexicon& lexicon);

/// f1 : f2 :: f3 : f4. f1, f2 share a gold row, as do f3, f4; f1, f3 share a
/// gold column, as do f2, f4. f1..f3 are attested, f4 is not.
struct AnalogyInstance {
  std::string f1, f2, f3, f4;
  std::size_t row12 = 0, row34 = 0;
  std::string cell13, cell24;

  auto operator<=>(const AnalogyInstance&) const = default;
};

/// Checks every constraint on `inst` against the gold grid and lexicon.
bool valid_instance(const AnalogyInstance& inst, const Grid& gold, const Lexicon& lexicon);

/// Samples up to `n` distinct instances uniformly without replacement.
/// Returns all of them, with a warning, when fewer than `n` exist; throws
/// PipelineError when none do.
std::vector<AnalogyInstance> sample_analogies(const Grid& gold, const Lexicon& lexicon, std::size_t n,
                                              std::uint64_t seed);

/// Fraction of instances whose row and column relations all hold in the
/// predicted grid. By default each relation is checked over any occurrences;
/// `joint` requires one consistent choice of two rows and two columns.
double analogy_accuracy(std::span<const AnalogyInstance> instances, const Grid& predicted, bool joint = false);

/// Fraction of instances whose f4 occupies any predicted slot.
double lexicon_expansion(std::span<const AnalogyInstance> instances, const Grid& predicted);

struct MetricsReport {
  double f_cell = 0;
  double f_par = 0;
  double f_grid = 0;
  double analogy = 0;
  double lexicon_expansion = 0;
  std::size_t instances = 0;
  std::vector<FormScore> per_form;

  /// Pretty-printed JSON object with the five metrics.
  std::string to_json(bool with_per_form = true) const;
  static MetricsReport from_json(const std::string& text);
  /// Aligned two-column table of the five metrics.
  void write_table(std::ostream& out) const;
};

MetricsReport evaluate(const Grid& predicted, const Grid& gold, const Lexicon& lexicon,
                       std::span<const AnalogyInstance> instances, bool joint_analogy = false);

/// Per-metric mean; per-form scores are dropped.
MetricsReport mean_report(std::span<const MetricsReport> reports);

/// "f1\tf2\tf3\tf4" lines. Reading resolves provenance against `gold` and
/// throws FormatError for instances that do not fit it.
void write_analogies_tsv(std::ostream& out, std::span<const AnalogyInstance> instances);
std::vector<AnalogyInstance> read_analogies_tsv(std::istream& in, const Grid& gold, const Lexicon& lexicon);

}  // namespace pdp
