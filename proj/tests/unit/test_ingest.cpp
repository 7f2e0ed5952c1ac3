#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pdp/error.hpp"
#include "pdp/ingest.hpp"
#include "pdp/utf8.hpp"

using namespace pdp;

namespace {

std::ifstream data(const std::string& name) {
  std::ifstream in(std::string(PDP_TEST_DATA) + "/" + name);
  REQUIRE(in.good());
  return in;
}

using Tokens = std::vector<std::string>;

}  // namespace

TEST_CASE("tokenizer splits off punctuation") {
  CHECK(tokenize_line("The cat watched me.") == Tokens{"The", "cat", "watched", "me", "."});
  CHECK(tokenize_line("watched,me") == Tokens{"watched", ",", "me"});
  CHECK(tokenize_line("\"Stop!\" she said") == Tokens{"\"", "Stop", "!", "\"", "she", "said"});
  CHECK(tokenize_line("don't well-known 'quoted'") ==
        Tokens{"don't", "well-known", "'quoted", "'"});
  CHECK(tokenize_line("Ярко, ясно.") == Tokens{"Ярко", ",", "ясно", "."});
  CHECK(tokenize_line("Mixed Case", {.lowercase = true}) == Tokens{"mixed", "case"});
}

TEST_CASE("tokenize treats lines as sentences") {
  CHECK(tokenize("").sentences.empty());
  const auto c = tokenize("a b\n\n  \nc d e\n");
  REQUIRE(c.sentences.size() == 2);
  CHECK(c.token_count() == 5);
  for (const auto& s : c.sentences)
    for (const auto& t : s) CHECK_FALSE(t.empty());
}

TEST_CASE("normalize") {
  CHECK(normalize("fīliō", {.strip_diacritics = true}) == "filio");
  CHECK(normalize("Katze", {}) == "Katze");
  CHECK(normalize("Straße", {.case_fold = true}) == "strasse");
  CHECK(normalize("ÉCOLE", {.strip_diacritics = true, .case_fold = true}) == "ecole");
}

TEST_CASE("normalize is idempotent on random forms") {
  const std::u32string pool = U"aeiouAEIOUáéíóúÀÈñÑçÇßāīūőűøåæœ日本ǅﬁ";
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    std::u32string s;
    const auto len = 1 + rng() % 10;
    for (std::size_t j = 0; j < len; ++j) s += pool[rng() % pool.size()];
    const auto form = utf8::encode(s);
    for (const bool strip : {false, true})
      for (const bool fold : {false, true}) {
        const NormalizeConfig nc{strip, fold};
        const auto once = normalize(form, nc);
        CHECK(normalize(once, nc) == once);
      }
  }
}

TEST_CASE("canonical cell labels") {
  CHECK(canonical_cell("V;V.PTCP;PST") == "V;PST;V.PTCP");
  CHECK(canonical_cell("SG;3;PRS;V") == "V;3;PRS;SG");
  CHECK(canonical_cell("N;PL") == "N;PL");
  CHECK(ud_features_to_cell("VERB", "Mood=Ind|Tense=Past|VerbForm=Fin") == "V;PST");
  CHECK(ud_features_to_cell("VERB", "Tense=Past|VerbForm=Part") == "V;PST;V.PTCP");
  CHECK(ud_features_to_cell("VERB", "_") == "V");
  CHECK(ud_features_to_cell("NOUN", "Case=Acc|Number=Plur") == "N;ACC;PL");
}

TEST_CASE("parse_annotations reads tuples for one part of speech") {
  auto in = data("toy.conllu");
  const auto a = parse_annotations(in, "VERB");
  const std::vector<AnalysisTuple> expected = {
      {"followed", "follow", "V;PST", 1},  {"follows", "follow", "V;3;PRS;SG", 1},
      {"see", "see", "V;NFIN", 1},         {"seen", "see", "V;PST;V.PTCP", 1},
      {"watched", "watch", "V;PST", 1},    {"watching", "watch", "V;PRS;V.PTCP", 1}};
  CHECK(a.tuples == expected);
  REQUIRE(a.corpus.sentences.size() == 3);
  CHECK(a.corpus.token_count() == 26);
  CHECK(a.corpus.sentences[0] == Tokens{"The", "cat", "watched", "me", "watching", "it", "."});

  auto in2 = data("toy.conllu");
  const auto nouns = parse_annotations(in2, "NOUN");
  for (const auto& t : nouns.tuples) CHECK(t.cell.rfind("N", 0) == 0);
  CHECK(nouns.tuples.size() == 3);
}

TEST_CASE("parse_annotations counts repeated analyses") {
  std::stringstream in(
      "1\twatched\twatch\tVERB\t_\tTense=Past\t0\troot\t_\t_\n\n"
      "1-2\tdidn't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\twatched\twatch\tVERB\t_\tTense=Past\t0\troot\t_\t_\n"
      "1.1\tghost\t_\tVERB\t_\t_\t_\t_\t_\t_\n\n");
  const auto a = parse_annotations(in, "VERB");
  REQUIRE(a.tuples.size() == 1);
  CHECK(a.tuples[0] == AnalysisTuple{"watched", "watch", "V;PST", 2});
}

TEST_CASE("malformed annotation lines are reported by number") {
  auto in = data("malformed.conllu");
  try {
    parse_annotations(in, "VERB");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("parse_inflection_tables") {
  std::stringstream one("watch\twatched\tV;PST\n");
  const auto t = parse_inflection_tables(one);
  CHECK(t.at("watch").at("V;PST") == Tokens{"watched"});

  std::stringstream dup("watch\twatched\tV;PST\nwatch\twatched\tV;PST\n");
  CHECK(parse_inflection_tables(dup).at("watch").at("V;PST").size() == 1);

  auto two = data("overabundant_tables.tsv");
  CHECK(parse_inflection_tables(two).at("color").at("N;SG") == Tokens{"color", "colour"});

  auto bad = data("malformed_tables.tsv");
  try {
    parse_inflection_tables(bad);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("gold grid holds the full table of every attested lemma") {
  const std::vector<AnalysisTuple> tuples = {{"watched", "watch", "V;PST", 1}};
  auto in = data("toy_tables.tsv");
  const auto grid = build_gold_grid(tuples, parse_inflection_tables(in));
  REQUIRE(grid.rows.size() == 1);
  const auto& slots = grid.rows[0].slots;
  CHECK(slots.size() == 5);
  CHECK(slots.at("V;NFIN").forms == Tokens{"watch"});
  CHECK(slots.at("V;3;PRS;SG").forms == Tokens{"watches"});
  CHECK(slots.at("V;PRS;V.PTCP").forms == Tokens{"watching"});
  CHECK(slots.at("V;PST").forms == Tokens{"watched"});
  CHECK(slots.at("V;PST;V.PTCP").forms == Tokens{"watched"});

  CHECK_THROWS_AS(build_gold_grid({}, parse_inflection_tables(in)), PipelineError);
}

TEST_CASE("overabundant slots keep the most frequent realisation") {
  auto ann = data("overabundant.conllu");
  const auto a = parse_annotations(ann, "NOUN");
  auto tab = data("overabundant_tables.tsv");
  const auto grid = build_gold_grid(a.tuples, parse_inflection_tables(tab));
  REQUIRE(grid.rows.size() == 1);
  CHECK(grid.rows[0].slots.at("N;SG").forms == Tokens{"color"});
  // Neither plural is preferred by the data, so the tie goes to byte order.
  CHECK(grid.rows[0].slots.at("N;PL").forms == Tokens{"colors"});

  const auto lex = build_lexicon(a.tuples, a.corpus, "NOUN");
  CHECK(lex.contains("color"));
  CHECK(lex.contains("colour"));
  CHECK(lex.entries.at("color") == 3);
}

TEST_CASE("toy lexicon and gold grid invariants") {
  auto in = data("toy.conllu");
  const auto a = parse_annotations(in, "VERB");
  const auto lex = build_lexicon(a.tuples, a.corpus, "VERB");
  CHECK(lex.forms() == Tokens{"followed", "follows", "see", "seen", "watched", "watching"});
  const auto freq = a.corpus.frequencies();
  for (const auto& [form, count] : lex.entries) CHECK(freq.at(form) == count);

  auto tab = data("toy_tables.tsv");
  const auto grid = build_gold_grid(a.tuples, parse_inflection_tables(tab));
  CHECK(grid.rows.size() == 3);
  for (const auto& row : grid.rows) {
    bool attested = false;
    for (const auto& [cell, slot] : row.slots) {
      CHECK(slot.forms.size() == 1);
      attested = attested || lex.contains(slot.forms[0]);
    }
    CHECK(attested);
  }
  auto tab2 = data("toy_tables.tsv");
  CHECK(build_gold_grid(a.tuples, parse_inflection_tables(tab2)) == grid);
}

TEST_CASE("corpus and lexicon jsonl round trip") {
  Corpus c;
  c.sentences = {{"a", "b"}, {"ü", "\"q\""}};
  std::stringstream cs;
  write_corpus_jsonl(cs, c);
  CHECK(read_corpus_jsonl(cs).sentences == c.sentences);

  Lexicon lex;
  lex.pos = "VERB";
  lex.entries = {{"see", 3}, {"seen", 1}};
  std::stringstream ls;
  write_lexicon_jsonl(ls, lex);
  const auto back = read_lexicon_jsonl(ls);
  CHECK(back.pos == "VERB");
  CHECK(back.entries == lex.entries);
}
