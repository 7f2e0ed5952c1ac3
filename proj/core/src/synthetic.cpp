#include "pdp/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pdp/error.hpp"
#include "pdp/ingest.hpp"
#include "pdp/pipeline.hpp"

namespace pdp {

namespace fs = std::filesystem;

namespace {

constexpr const char* kConsonants = "ptkbdgmnslrvz";
constexpr const char* kVowels = "aeiou";

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Samples an index from fixed weights by inverting the cumulative sum.
class Sampler {
 public:
  explicit Sampler(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) cumulative_.push_back(total += w);
  }
  std::size_t operator()(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

std::vector<double> zipf(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  return w;
}

std::string cv_word(std::mt19937_64& rng, std::size_t length) {
  std::string w;
  for (std::size_t i = 0; i < length; ++i) w += i % 2 == 0 ? kConsonants[rng() % 13] : kVowels[rng() % 5];
  return w;
}

struct Token {
  std::string form, lemma, upos, feats;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

void write_conllu_sentence(std::ostream& out, std::size_t id, const std::vector<Token>& tokens, std::size_t head) {
  out << "# sent_id = " << id << "\n# text =";
  for (const auto& t : tokens) out << ' ' << t.form;
  out << '\n';
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    const bool is_head = i + 1 == head;
    out << i + 1 << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << "\t_\t" << t.feats << '\t'
        << (is_head ? 0 : head) << '\t' << (is_head ? "root" : "dep") << "\t_\t_\n";
  }
  out << '\n';
}

}  // namespace

SyntheticLanguage make_language(const SyntheticConfig& config) {
  if (config.stems < 2) throw std::invalid_argument("synthetic language needs at least two stems");
  if (config.cells < 2 || config.cells > 8) throw std::invalid_argument("synthetic language needs 2 to 8 cells");
  std::mt19937_64 rng(config.seed);
  SyntheticLanguage lang;

  std::vector<std::string> suffixes = {"a", "om", "e", "ul", "i", "ar", "o", "en"};
  for (std::size_t i = suffixes.size(); i > 1; --i) std::swap(suffixes[i - 1], suffixes[rng() % i]);
  lang.suffixes.assign(suffixes.begin(), suffixes.begin() + config.cells);

  const char* cases[] = {"Nom", "Acc", "Gen", "Dat"};
  const char* numbers[] = {"Sing", "Plur"};
  for (int c = 0; c < config.cells; ++c) {
    std::string feats = std::string("Case=") + cases[c / 2] + "|Number=" + numbers[c % 2];
    lang.cell_labels.push_back(ud_features_to_cell("NOUN", feats));
    lang.cell_features.push_back(std::move(feats));
  }

  std::set<std::string> forms;
  while (lang.stems.size() < static_cast<std::size_t>(config.stems)) {
    const auto stem = cv_word(rng, 5 + rng() % 4);
    bool clash = false;
    for (const auto& s : lang.suffixes) clash = clash || forms.count(stem + s);
    if (clash || std::find(lang.stems.begin(), lang.stems.end(), stem) != lang.stems.end()) continue;
    for (const auto& s : lang.suffixes) forms.insert(stem + s);
    lang.stems.push_back(stem);
  }

  for (std::size_t s = 0; s < lang.stems.size(); ++s) {
    std::vector<bool> row(lang.suffixes.size());
    std::size_t kept = 0;
    for (std::size_t c = 0; c < row.size(); ++c) kept += (row[c] = uniform01(rng) < config.attestation);
    for (std::size_t c = 0; kept < 2 && c < row.size(); ++c)
      if (!row[c]) {
        row[c] = true;
        ++kept;
      }
    lang.attested.push_back(std::move(row));
  }
  return lang;
}

FixtureFiles write_synthetic_fixture(const fs::path& dir, const SyntheticConfig& config) {
  const auto lang = make_language(config);
  std::mt19937_64 rng(config.seed ^ 0x5deece66dULL);
  const auto n_cells = lang.suffixes.size();

  // Cell-specific words around each noun give the cells a distributional
  // signature; fillers pad the sentences.
  std::vector<std::string> left, right, fillers;
  std::set<std::string> used(lang.stems.begin(), lang.stems.end());
  const auto fresh = [&](std::size_t len) {
    for (;;) {
      auto w = cv_word(rng, len);
      if (used.insert(w).second) return w;
    }
  };
  for (std::size_t c = 0; c < n_cells; ++c) {
    left.push_back(fresh(2));
    right.push_back(fresh(3));
  }
  for (int i = 0; i < 40; ++i) fillers.push_back(fresh(3 + static_cast<std::size_t>(i % 2)));

  const Sampler stem_sampler(zipf(lang.stems.size()));
  const Sampler cell_sampler(zipf(n_cells));
  const Sampler filler_sampler(zipf(fillers.size()));

  const auto sentence = [&](std::size_t s, std::size_t c, std::size_t& head) {
    std::vector<Token> tokens;
    const auto pad = [&] {
      const std::size_t n = 1 + rng() % 3;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& f = fillers[filler_sampler(rng)];
        tokens.push_back({f, f, "ADV", "_"});
      }
    };
    pad();
    tokens.push_back({left[c], left[c], "ADP", "_"});
    tokens.push_back({lang.form(s, c), lang.stems[s], "NOUN", lang.cell_features[c]});
    head = tokens.size();
    tokens.push_back({right[c], right[c], "PART", "_"});
    pad();
    return tokens;
  };

  std::ostringstream conllu, raw;
  std::size_t tokens = 0, sent_id = 0, head = 0;
  for (std::size_t s = 0; s < lang.stems.size(); ++s)
    for (std::size_t c = 0; c < n_cells; ++c)
      if (lang.attested[s][c]) {
        const auto t = sentence(s, c, head);
        write_conllu_sentence(conllu, ++sent_id, t, head);
        tokens += t.size();
      }
  while (tokens < config.tokens) {
    const auto s = stem_sampler(rng);
    auto c = cell_sampler(rng);
    if (!lang.attested[s][c]) continue;
    const auto t = sentence(s, c, head);
    tokens += t.size();
    if (uniform01(rng) < config.annotated_fraction) {
      write_conllu_sentence(conllu, ++sent_id, t, head);
    } else {
      for (std::size_t i = 0; i < t.size(); ++i) raw << (i ? " " : "") << t[i].form;
      raw << '\n';
    }
  }

  std::ostringstream tables;
  for (std::size_t s = 0; s < lang.stems.size(); ++s)
    for (std::size_t c = 0; c < n_cells; ++c)
      tables << lang.stems[s] << '\t' << lang.form(s, c) << '\t' << lang.cell_labels[c] << '\n';

  fs::create_directories(dir);
  FixtureFiles files{dir / "raw.txt", dir / "annotated.conllu", dir / "tables.tsv", dir / "config.json"};
  write_file(files.raw_text, raw.str());
  write_file(files.annotations, conllu.str());
  write_file(files.tables, tables.str());

  PipelineConfig pc;
  pc.raw_text = "raw.txt";
  pc.annotations = "annotated.conllu";
  pc.tables = "tables.tsv";
  pc.pos = "NOUN";
  pc.cells.k_max = 12;
  pc.paradigms.neighbors = 50;
  pc.seed = config.seed;
  pc.output = "out";
  write_file(files.config, config_to_json(pc));
  return files;
}

FixtureFiles write_toy_fixture(const fs::path& dir) {
  fs::create_directories(dir);
  FixtureFiles files{{}, dir / "toy.conllu", dir / "tables.tsv", dir / "config.json"};
  write_file(files.annotations,
             "# text = The cat watched me watching it .\n"
             "1\tThe\tthe\tDET\t_\tDefinite=Def|PronType=Art\t2\tdet\t_\t_\n"
             "2\tcat\tcat\tNOUN\t_\tNumber=Sing\t3\tnsubj\t_\t_\n"
             "3\twatched\twatch\tVERB\t_\tMood=Ind|Tense=Past|VerbForm=Fin\t0\troot\t_\t_\n"
             "4\tme\tI\tPRON\t_\tCase=Acc|Number=Sing|Person=1|PronType=Prs\t3\tobj\t_\t_\n"
             "5\twatching\twatch\tVERB\t_\tTense=Pres|VerbForm=Part\t3\txcomp\t_\t_\n"
             "6\tit\tit\tPRON\t_\tCase=Acc|Number=Sing|Person=3|PronType=Prs\t5\tobj\t_\t_\n"
             "7\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_\n"
             "\n"
             "# text = I followed the show but she had n't seen it .\n"
             "1\tI\tI\tPRON\t_\tCase=Nom|Number=Sing|Person=1|PronType=Prs\t2\tnsubj\t_\t_\n"
             "2\tfollowed\tfollow\tVERB\t_\tMood=Ind|Tense=Past|VerbForm=Fin\t0\troot\t_\t_\n"
             "3\tthe\tthe\tDET\t_\tDefinite=Def|PronType=Art\t4\tdet\t_\t_\n"
             "4\tshow\tshow\tNOUN\t_\tNumber=Sing\t2\tobj\t_\t_\n"
             "5\tbut\tbut\tCCONJ\t_\t_\t9\tcc\t_\t_\n"
             "6\tshe\tshe\tPRON\t_\tCase=Nom|Gender=Fem|Number=Sing|Person=3|PronType=Prs\t9\tnsubj\t_\t_\n"
             "7\thad\thave\tAUX\t_\tMood=Ind|Tense=Past|VerbForm=Fin\t9\taux\t_\t_\n"
             "8\tn't\tnot\tPART\t_\tPolarity=Neg\t9\tadvmod\t_\t_\n"
             "9\tseen\tsee\tVERB\t_\tTense=Past|VerbForm=Part\t2\tconj\t_\t_\n"
             "10\tit\tit\tPRON\t_\tCase=Acc|Number=Sing|Person=3|PronType=Prs\t9\tobj\t_\t_\n"
             "11\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n"
             "\n"
             "# text = Let 's see who follows your logic .\n"
             "1\tLet\tlet\tAUX\t_\tMood=Imp|VerbForm=Fin\t0\troot\t_\t_\n"
             "2\t's\twe\tPRON\t_\tCase=Acc|Number=Plur|Person=1|PronType=Prs\t1\tobj\t_\t_\n"
             "3\tsee\tsee\tVERB\t_\tVerbForm=Inf\t1\txcomp\t_\t_\n"
             "4\twho\twho\tPRON\t_\tPronType=Int\t5\tnsubj\t_\t_\n"
             "5\tfollows\tfollow\tVERB\t_\tMood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin\t3\tccomp\t_\t_\n"
             "6\tyour\tyou\tPRON\t_\tPerson=2|Poss=Yes|PronType=Prs\t7\tnmod:poss\t_\t_\n"
             "7\tlogic\tlogic\tNOUN\t_\tNumber=Sing\t5\tobj\t_\t_\n"
             "8\t.\t.\tPUNCT\t_\t_\t1\tpunct\t_\t_\n"
             "\n");
  const char* tables[][2] = {{"watch", "watch"},  {"watch", "watches"},   {"watch", "watching"},
                             {"watch", "watched"}, {"watch", "watched"},   {"follow", "follow"},
                             {"follow", "follows"}, {"follow", "following"}, {"follow", "followed"},
                             {"follow", "followed"}, {"see", "see"},      {"see", "sees"},
                             {"see", "seeing"},    {"see", "saw"},        {"see", "seen"}};
  const char* cells[] = {"V;NFIN", "V;3;PRS;SG", "V;PRS;V.PTCP", "V;PST", "V;PST;V.PTCP"};
  std::ostringstream t;
  for (std::size_t i = 0; i < 15; ++i) t << tables[i][0] << '\t' << tables[i][1] << '\t' << cells[i % 5] << '\n';
  write_file(files.tables, t.str());

  PipelineConfig pc;
  pc.annotations = "toy.conllu";
  pc.tables = "tables.tsv";
  pc.pos = "VERB";
  pc.output = "out";
  write_file(files.config, config_to_json(pc));
  return files;
}

}  // namespace pdp
