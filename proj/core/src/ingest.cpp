#include "pdp/ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "json.hpp"
#include "pdp/error.hpp"
#include "pdp/utf8.hpp"

namespace pdp {

using nlohmann::json;

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::map<std::string, std::size_t> Corpus::frequencies() const {
  std::map<std::string, std::size_t> freq;
  for (const auto& s : sentences)
    for (const auto& tok : s) ++freq[tok];
  return freq;
}

void Corpus::append(const Corpus& other) {
  sentences.insert(sentences.end(), other.sentences.begin(), other.sentences.end());
}

std::vector<std::string> Lexicon::forms() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& [form, count] : entries) out.push_back(form);
  return out;
}

namespace {

std::string to_lower(const std::string& s) {
  auto u = icu::UnicodeString::fromUTF8(s);
  u.toLower(icu::Locale::getRoot());
  std::string out;
  return u.toUTF8String(out);
}

bool is_apostrophe(char32_t c) { return c == U'\'' || c == U'’'; }

bool is_word_char(char32_t c) { return u_isalnum(static_cast<UChar32>(c)) || u_charType(c) == U_NON_SPACING_MARK; }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> tokenize_line(std::string_view line, const TokenizeConfig& config) {
  const std::u32string cps = utf8::decode(line);
  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (current.empty()) return;
    auto tok = utf8::encode(current);
    tokens.push_back(config.lowercase ? to_lower(tok) : std::move(tok));
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      flush();
      continue;
    }
    if (!u_ispunct(static_cast<UChar32>(c))) {
      current.push_back(c);
      continue;
    }
    const bool next_word = i + 1 < cps.size() && is_word_char(cps[i + 1]);
    const bool prev_word = !current.empty() && is_word_char(current.back());
    if (is_apostrophe(c) && next_word) {
      current.push_back(c);  // clitics and contractions: 's, n't, don't
      continue;
    }
    if (c == U'-' && prev_word && next_word) {
      current.push_back(c);
      continue;
    }
    flush();
    current.push_back(c);
    flush();
  }
  flush();
  return tokens;
}

Corpus tokenize(std::string_view raw_text, const TokenizeConfig& config) {
  Corpus corpus;
  std::size_t start = 0;
  while (start <= raw_text.size()) {
    auto end = raw_text.find('\n', start);
    if (end == std::string_view::npos) end = raw_text.size();
    auto tokens = tokenize_line(raw_text.substr(start, end - start), config);
    if (!tokens.empty()) corpus.sentences.push_back(std::move(tokens));
    start = end + 1;
  }
  return corpus;
}

std::string normalize(std::string_view form, const NormalizeConfig& config) {
  if (!config.strip_diacritics && !config.case_fold) return std::string(form);
  UErrorCode status = U_ZERO_ERROR;
  auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(form.data(), static_cast<int32_t>(form.size())));
  // Fold before stripping: folding can introduce combining marks (U+0130).
  if (config.case_fold) u.foldCase();
  if (config.strip_diacritics) {
    const auto* nfd = icu::Normalizer2::getNFDInstance(status);
    icu::UnicodeString decomposed = nfd->normalize(u, status);
    icu::UnicodeString kept;
    for (int32_t i = 0; i < decomposed.length();) {
      const UChar32 c = decomposed.char32At(i);
      if (u_charType(c) != U_NON_SPACING_MARK) kept.append(c);
      i += U16_LENGTH(c);
    }
    u = kept;
  }
  const auto* nfc = icu::Normalizer2::getNFCInstance(status);
  u = nfc->normalize(u, status);
  if (U_FAILURE(status)) throw PipelineError(std::string("unicode normalisation failed: ") + u_errorName(status));
  std::string out;
  return u.toUTF8String(out);
}

namespace {

// V.PTCP and friends are both part-of-speech-like and features in UniMorph;
// only the bare major-class tags lead the canonical label.
bool leads_label(std::string_view f) {
  return f == "N" || f == "PROPN" || f == "V" || f == "ADJ" || f == "ADV" || f == "PRO" || f == "DET" ||
         f == "NUM" || f == "ADP" || f == "AUX" || f == "ART";
}

const std::unordered_map<std::string, std::string>& upos_map() {
  static const std::unordered_map<std::string, std::string> m = {
      {"NOUN", "N"}, {"PROPN", "PROPN"}, {"VERB", "V"}, {"AUX", "AUX"}, {"ADJ", "ADJ"}, {"ADV", "ADV"},
      {"PRON", "PRO"}, {"DET", "DET"},   {"NUM", "NUM"}, {"ADP", "ADP"}};
  return m;
}

// UD feature=value -> UniMorph feature. Unlisted pairs carry no inflectional
// distinction that UniMorph tables mark and are dropped (e.g. Mood=Ind,
// VerbForm=Fin, PronType).
const std::unordered_map<std::string, std::string>& feature_map() {
  static const std::unordered_map<std::string, std::string> m = {
      {"Tense=Past", "PST"},      {"Tense=Pres", "PRS"},      {"Tense=Fut", "FUT"},
      {"Tense=Imp", "PST;IPFV"},  {"Tense=Pqp", "PST;PRF"},   {"VerbForm=Inf", "NFIN"},
      {"VerbForm=Part", "V.PTCP"}, {"VerbForm=Ger", "V.MSDR"}, {"VerbForm=Conv", "V.CVB"},
      {"VerbForm=Sup", "SUP"},    {"Mood=Sub", "SBJV"},       {"Mood=Imp", "IMP"},
      {"Mood=Cnd", "COND"},       {"Mood=Opt", "OPT"},        {"Mood=Jus", "JUS"},
      {"Number=Sing", "SG"},      {"Number=Plur", "PL"},      {"Number=Dual", "DU"},
      {"Person=1", "1"},          {"Person=2", "2"},          {"Person=3", "3"},
      {"Case=Nom", "NOM"},        {"Case=Gen", "GEN"},        {"Case=Dat", "DAT"},
      {"Case=Acc", "ACC"},        {"Case=Abl", "ABL"},        {"Case=Voc", "VOC"},
      {"Case=Loc", "LOC"},        {"Case=Ins", "INS"},        {"Case=Par", "PRT"},
      {"Case=Ess", "ESS"},        {"Case=Ill", "IN+ALL"},     {"Case=Ela", "IN+ABL"},
      {"Gender=Masc", "MASC"},    {"Gender=Fem", "FEM"},      {"Gender=Neut", "NEUT"},
      {"Definite=Def", "DEF"},    {"Definite=Ind", "INDF"},   {"Definite=Cons", "PSSD"},
      {"Aspect=Perf", "PFV"},     {"Aspect=Imp", "IPFV"},     {"Aspect=Prog", "PROG"},
      {"Voice=Act", "ACT"},       {"Voice=Pass", "PASS"},     {"Voice=Mid", "MID"},
      {"Degree=Cmp", "CMPR"},     {"Degree=Sup", "SPRL"},     {"Animacy=Anim", "ANIM"},
      {"Animacy=Inan", "INAN"},   {"Polarity=Neg", "NEG"}};
  return m;
}

}  // namespace

std::string canonical_cell(std::string_view label) {
  std::vector<std::string> lead, rest;
  std::set<std::string> seen;
  for (auto part : split(label, ';')) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (part.empty() || !seen.emplace(part).second) continue;
    (leads_label(part) ? lead : rest).emplace_back(part);
  }
  std::sort(lead.begin(), lead.end());
  std::sort(rest.begin(), rest.end());
  std::string out;
  for (const auto* group : {&lead, &rest})
    for (const auto& f : *group) {
      if (!out.empty()) out += ';';
      out += f;
    }
  return out;
}

std::string ud_features_to_cell(std::string_view upos, std::string_view feats) {
  std::string label;
  if (auto it = upos_map().find(std::string(upos)); it != upos_map().end())
    label = it->second;
  else
    label = std::string(upos);
  if (feats != "_" && !feats.empty()) {
    for (auto feat : split(feats, '|')) {
      const auto eq = feat.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = feat.substr(0, eq);
      for (auto value : split(feat.substr(eq + 1), ',')) {
        std::string kv = std::string(key) + "=" + std::string(value);
        if (auto it = feature_map().find(kv); it != feature_map().end()) label += ";" + it->second;
      }
    }
  }
  return canonical_cell(label);
}

Annotations parse_annotations(std::istream& in, std::string_view pos_filter, const NormalizeConfig& nc) {
  Annotations result;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> counts;
  std::vector<std::string> sentence;
  std::string raw;
  std::size_t lineno = 0;
  auto end_sentence = [&] {
    if (!sentence.empty()) result.corpus.sentences.push_back(std::move(sentence));
    sentence.clear();
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim_cr(raw);
    if (line.empty()) {
      end_sentence();
      continue;
    }
    if (line.front() == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 10)
      throw FormatError("expected 10 tab-separated CoNLL-U columns, found " + std::to_string(cols.size()), lineno);
    const auto id = cols[0];
    if (id.empty()) throw FormatError("empty token id", lineno);
    // Multiword ranges (1-2) and empty nodes (3.1) carry no word of their own.
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) continue;
    if (!std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw FormatError("malformed token id '" + std::string(id) + "'", lineno);
    if (cols[1].empty()) throw FormatError("empty FORM column", lineno);
    std::string form = normalize(cols[1], nc);
    sentence.push_back(form);
    if (cols[3] == pos_filter) {
      std::string lemma = normalize(cols[2], nc);
      ++counts[{std::move(form), std::move(lemma), ud_features_to_cell(cols[3], cols[5])}];
    }
  }
  end_sentence();
  for (auto& [key, count] : counts) {
    const auto& [form, lemma, cell] = key;
    result.tuples.push_back({form, lemma, cell, count});
  }
  return result;
}

InflectionTables parse_inflection_tables(std::istream& in, const NormalizeConfig& nc) {
  InflectionTables tables;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim_cr(raw);
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 3)
      throw FormatError("expected 3 tab-separated columns (lemma, form, cell), found " + std::to_string(cols.size()),
                        lineno);
    if (cols[0].empty() || cols[1].empty() || cols[2].empty()) throw FormatError("empty column", lineno);
    auto& forms = tables[normalize(cols[0], nc)][canonical_cell(cols[2])];
    std::string form = normalize(cols[1], nc);
    if (std::find(forms.begin(), forms.end(), form) == forms.end()) {
      forms.push_back(std::move(form));
      std::sort(forms.begin(), forms.end());
    }
  }
  return tables;
}

Grid build_gold_grid(const std::vector<AnalysisTuple>& tuples, const InflectionTables& tables) {
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> attested;
  std::set<std::string> lemmas;
  std::map<std::string, std::set<std::string>> tuple_forms;  // lemma -> annotated forms
  for (const auto& t : tuples) {
    attested[{t.form, t.lemma, t.cell}] += t.count;
    const auto table = tables.find(t.lemma);
    if (table == tables.end()) continue;
    const auto slot = table->second.find(t.cell);
    if (slot == table->second.end()) continue;
    if (std::find(slot->second.begin(), slot->second.end(), t.form) == slot->second.end()) continue;
    lemmas.insert(t.lemma);
    tuple_forms[t.lemma].insert(t.form);
  }

  Grid grid;
  for (const auto& lemma : lemmas) {
    GridRow row;
    bool keeps_attested = false;
    for (const auto& [cell, forms] : tables.at(lemma)) {
      // Most frequently annotated realisation wins; forms arrive sorted, so
      // the strict comparison breaks ties lexicographically.
      const std::string* best = &forms.front();
      std::size_t best_count = 0;
      for (const auto& f : forms) {
        const auto it = attested.find({f, lemma, cell});
        const std::size_t c = it == attested.end() ? 0 : it->second;
        if (c > best_count) {
          best = &f;
          best_count = c;
        }
      }
      row.slots[cell].forms = {*best};
      keeps_attested = keeps_attested || tuple_forms[lemma].count(*best) > 0;
    }
    if (keeps_attested) grid.rows.push_back(std::move(row));
  }
  if (grid.rows.empty()) throw PipelineError("no gold paradigms: no annotated analysis matches an inflection table");
  return grid;
}

Lexicon build_lexicon(const std::vector<AnalysisTuple>& tuples, const Corpus& corpus, std::string pos) {
  Lexicon lex;
  lex.pos = std::move(pos);
  const auto freq = corpus.frequencies();
  for (const auto& t : tuples) {
    const auto it = freq.find(t.form);
    if (it != freq.end()) lex.entries[t.form] = it->second;
  }
  return lex;
}

void write_corpus_jsonl(std::ostream& out, const Corpus& corpus) {
  for (const auto& s : corpus.sentences) out << json{{"tokens", s}}.dump() << '\n';
}

Corpus read_corpus_jsonl(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      corpus.sentences.push_back(json::parse(line).at("tokens").get<std::vector<std::string>>());
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad corpus record: ") + e.what(), lineno);
    }
  }
  return corpus;
}

void write_lexicon_jsonl(std::ostream& out, const Lexicon& lexicon) {
  for (const auto& [form, count] : lexicon.entries)
    out << json{{"form", form}, {"count", count}, {"pos", lexicon.pos}}.dump() << '\n';
}

Lexicon read_lexicon_jsonl(std::istream& in) {
  Lexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto rec = json::parse(line);
      lex.entries[rec.at("form").get<std::string>()] = rec.at("count").get<std::size_t>();
      lex.pos = rec.at("pos").get<std::string>();
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad lexicon record: ") + e.what(), lineno);
    }
  }
  return lex;
}

}  // namespace pdp
