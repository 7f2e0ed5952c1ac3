#pragma once

// Corpus, lexicon and gold-grid construction from CoNLL-U annotations,
// inflection tables and raw text.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pdp/grid.hpp"

namespace pdp {

struct Corpus {
  std::vector<std::vector<std::string>> sentences;

  std::size_t token_count() const;
  /// Token -> occurrence count over every sentence.
  std::map<std::string, std::size_t> frequencies() const;
  void append(const Corpus& other);
};

/// Forms of a single part of speech with their corpus frequencies.
struct Lexicon {
  std::string pos;
  std::map<std::string, std::size_t> entries;

  bool contains(std::string_view form) const { return entries.find(std::string(form)) != entries.end(); }
  std::size_t size() const { return entries.size(); }
  std::vector<std::string> forms() const;
};

struct AnalysisTuple {
  std::string form;
  std::string lemma;
  std::string cell;
  std::size_t count = 1;

  bool operator==(const AnalysisTuple&) const = default;
};

struct NormalizeConfig {
  bool strip_diacritics = false;
  bool case_fold = false;
};

struct TokenizeConfig {
  bool lowercase = false;
};

/// Splits one line into tokens: whitespace-delimited, with punctuation
/// detached. Apostrophes followed by a letter and hyphens between letters
/// stay word-internal.
std::vector<std::string> tokenize_line(std::string_view line, const TokenizeConfig& config = {});

/// One sentence per non-blank line.
Corpus tokenize(std::string_view raw_text, const TokenizeConfig& config = {});

/// Deterministic, idempotent orthographic normalisation.
std::string normalize(std::string_view form, const NormalizeConfig& config);

/// Canonical cell label: part-of-speech features first, remaining features
/// in byte order, joined by ';'. "V;V.PTCP;PST" -> "V;PST;V.PTCP".
std::string canonical_cell(std::string_view label);

/// Converts a UD UPOS tag and FEATS column into a canonical cell label.
std::string ud_features_to_cell(std::string_view upos, std::string_view feats);

struct Annotations {
  std::vector<AnalysisTuple> tuples;  // sorted by (form, lemma, cell)
  Corpus corpus;                      // annotated sentences as plain tokens
};

/// Parses CoNLL-U. Tuples are restricted to `pos_filter` (a UPOS tag).
Annotations parse_annotations(std::istream& in, std::string_view pos_filter,
                              const NormalizeConfig& normalize_config = {});

/// lemma -> cell label -> every distinct form listed for it.
using InflectionTables = std::map<std::string, std::map<std::string, std::vector<std::string>>>;

/// Parses 3-column (lemma, form, cell) TSV.
InflectionTables parse_inflection_tables(std::istream& in, const NormalizeConfig& normalize_config = {});

/// Full table rows for every lemma whose (form, lemma, cell) analysis is
/// attested in both sources, keeping the most frequently annotated
/// realisation per slot.
Grid build_gold_grid(const std::vector<AnalysisTuple>& tuples, const InflectionTables& tables);

Lexicon build_lexicon(const std::vector<AnalysisTuple>& tuples, const Corpus& corpus, std::string pos);

// Line-delimited JSON: {"tokens": [...]} per sentence and
// {"form": f, "count": n, "pos": p} per lexicon entry.
void write_corpus_jsonl(std::ostream& out, const Corpus& corpus);
Corpus read_corpus_jsonl(std::istream& in);
void write_lexicon_jsonl(std::ostream& out, const Lexicon& lexicon);
Lexicon read_lexicon_jsonl(std::istream& in);

}  // namespace pdp
