#pragma once

// Generated test languages. The synthetic language is agglutinative: every
// noun is a stem plus one suffix per cell, each suffix unique to its cell.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pdp {

struct SyntheticConfig {
  int stems = 50;
  int cells = 4;  // at most 8
  std::size_t tokens = 100'000;
  /// Share of sentences written as annotated CoNLL-U; the rest are raw text.
  double annotated_fraction = 0.25;
  /// Chance that a slot is attested at all. Every stem keeps at least two.
  double attestation = 0.75;
  std::uint64_t seed = 1;
};

struct SyntheticLanguage {
  std::vector<std::string> stems;
  std::vector<std::string> suffixes;      // one per cell
  std::vector<std::string> cell_features;  // UD FEATS per cell
  std::vector<std::string> cell_labels;   // canonical cell labels
  std::vector<std::vector<bool>> attested;  // [stem][cell]

  std::string form(std::size_t stem, std::size_t cell) const { return stems[stem] + suffixes[cell]; }
};

SyntheticLanguage make_language(const SyntheticConfig& config);

struct FixtureFiles {
  std::filesystem::path raw_text;
  std::filesystem::path annotations;
  std::filesystem::path tables;
  std::filesystem::path config;
};

/// Writes raw.txt, annotated.conllu, tables.tsv and config.json (NOUN
/// lexicon, output "out") into `dir`. Every attested slot occurs at least
/// once in the annotated part.
FixtureFiles write_synthetic_fixture(const std::filesystem::path& dir, const SyntheticConfig& config);

/// The three-sentence English example with watch, follow and see: an
/// annotated corpus, full inflection tables (syncretic past forms listed in
/// both past cells) and a config.
FixtureFiles write_toy_fixture(const std::filesystem::path& dir);

}  // namespace pdp
