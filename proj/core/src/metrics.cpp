#include "pdp/metrics.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "pdp/error.hpp"

namespace pdp {

namespace {

struct Occurrence {
  std::size_t row;
  std::string cell;
};

// Where every form sits, and which lexicon forms share each row and column.
struct GridIndex {
  std::map<std::string, std::vector<Occurrence>> occurrences;
  std::vector<std::vector<std::string>> row_lexical;
  std::map<std::string, std::vector<std::string>> column_lexical;

  GridIndex(const Grid& grid, const Lexicon* lexicon) : row_lexical(grid.rows.size()) {
    for (std::size_t r = 0; r < grid.rows.size(); ++r)
      for (const auto& [cell, slot] : grid.rows[r].slots)
        for (const auto& f : slot.forms) {
          occurrences[f].push_back({r, cell});
          if (lexicon && lexicon->contains(f)) {
            row_lexical[r].push_back(f);
            column_lexical[cell].push_back(f);
          }
        }
  }

  const std::vector<Occurrence>* find(const std::string& form) const {
    const auto it = occurrences.find(form);
    return it == occurrences.end() ? nullptr : &it->second;
  }

  std::set<std::string> mates(const std::string& form, MateMode mode) const {
    std::set<std::string> out;
    const auto* occ = find(form);
    if (!occ) return out;
    for (const auto& o : *occ) {
      if (mode == MateMode::paradigm) {
        out.insert(row_lexical[o.row].begin(), row_lexical[o.row].end());
      } else if (const auto col = column_lexical.find(o.cell); col != column_lexical.end()) {
        out.insert(col->second.begin(), col->second.end());
      }
    }
    out.erase(form);
    return out;
  }

  std::set<std::size_t> rows_of(const std::string& form) const {
    std::set<std::size_t> out;
    if (const auto* occ = find(form))
      for (const auto& o : *occ) out.insert(o.row);
    return out;
  }

  std::set<std::string> cells_of(const std::string& form) const {
    std::set<std::string> out;
    if (const auto* occ = find(form))
      for (const auto& o : *occ) out.insert(o.cell);
    return out;
  }
};

template <class T>
bool intersects(const std::set<T>& a, const std::set<T>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return true;
  }
  return false;
}

const Slot* slot_at(const Grid& grid, std::size_t row, const std::string& cell) {
  if (row >= grid.rows.size()) return nullptr;
  const auto& slots = grid.rows[row].slots;
  const auto it = slots.find(cell);
  return it == slots.end() ? nullptr : &it->second;
}

bool slot_has(const Grid& grid, std::size_t row, const std::string& cell, const std::string& form) {
  const auto* slot = slot_at(grid, row, cell);
  return slot && std::find(slot->forms.begin(), slot->forms.end(), form) != slot->forms.end();
}

struct Half {
  std::size_t row;
  const std::string* a;
  const std::string* b;
};

auto form_tuple(const AnalogyInstance& x) { return std::tie(x.f1, x.f2, x.f3, x.f4); }

}  // namespace

std::set<std::string> mates(const Grid& grid, const std::string& form, MateMode mode, const Lexicon& lexicon) {
  return GridIndex(grid, &lexicon).mates(form, mode);
}

double f_score(const std::set<std::string>& predicted, const std::set<std::string>& gold) {
  if (predicted.empty() && gold.empty()) return 1.0;
  if (predicted.empty() || gold.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& f : predicted) hit += gold.count(f);
  if (hit == 0) return 0.0;
  const double p = static_cast<double>(hit) / static_cast<double>(predicted.size());
  const double r = static_cast<double>(hit) / static_cast<double>(gold.size());
  return 2 * p * r / (p + r);
}

double harmonic_mean(double a, double b) { return a + b == 0 ? 0.0 : 2 * a * b / (a + b); }

PdpScores pdp_scores(const Grid& predicted, const Grid& gold, const Lexicon& lexicon) {
  const GridIndex gi(gold, &lexicon), pi(predicted, &lexicon);
  PdpScores out;
  for (const auto& [form, occ] : gi.occurrences) {
    if (!lexicon.contains(form)) continue;
    FormScore fs{form, f_score(pi.mates(form, MateMode::paradigm), gi.mates(form, MateMode::paradigm)),
                 f_score(pi.mates(form, MateMode::cell), gi.mates(form, MateMode::cell))};
    out.f_par += fs.f_par;
    out.f_cell += fs.f_cell;
    out.per_form.push_back(std::move(fs));
  }
  if (out.per_form.empty()) throw PipelineError("evaluation: no lexicon form occurs in the gold grid");
  const auto n = static_cast<double>(out.per_form.size());
  out.f_par /= n;
  out.f_cell /= n;
  out.f_grid = harmonic_mean(out.f_par, out.f_cell);
  return out;
}

bool valid_instance(const AnalogyInstance& x, const Grid& gold, const Lexicon& lexicon) {
  return x.row12 != x.row34 && x.cell13 != x.cell24 && x.f1 != x.f2 && x.f1 != x.f3 &&
         lexicon.contains(x.f1) && lexicon.contains(x.f2) && lexicon.contains(x.f3) && !lexicon.contains(x.f4) &&
         slot_has(gold, x.row12, x.cell13, x.f1) && slot_has(gold, x.row12, x.cell24, x.f2) &&
         slot_has(gold, x.row34, x.cell13, x.f3) && slot_has(gold, x.row34, x.cell24, x.f4);
}

std::vector<AnalogyInstance> sample_analogies(const Grid& gold, const Lexicon& lexicon, std::size_t n,
                                              std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_analogies: n must be >= 1");
  const auto cells = gold.cells();

  // For every ordered column pair: rows offering an attested (f1, f2) and
  // rows offering an attested f3 beside an unattested f4.
  struct Block {
    const std::string* c1;
    const std::string* c2;
    std::vector<Half> left, right;
  };
  std::vector<Block> blocks;
  for (const auto& c1 : cells)
    for (const auto& c2 : cells) {
      if (c1 == c2) continue;
      Block b{&c1, &c2, {}, {}};
      for (std::size_t r = 0; r < gold.rows.size(); ++r) {
        const auto* s1 = slot_at(gold, r, c1);
        const auto* s2 = slot_at(gold, r, c2);
        if (!s1 || !s2) continue;
        for (const auto& a : s1->forms) {
          if (!lexicon.contains(a)) continue;
          for (const auto& z : s2->forms) {
            if (lexicon.contains(z)) {
              if (a != z) b.left.push_back({r, &a, &z});
            } else {
              b.right.push_back({r, &a, &z});
            }
          }
        }
      }
      if (!b.left.empty() && !b.right.empty()) blocks.push_back(std::move(b));
    }

  const auto make = [](const Block& b, const Half& l, const Half& r) -> std::optional<AnalogyInstance> {
    if (l.row == r.row || *l.a == *r.a) return std::nullopt;
    return AnalogyInstance{*l.a, *l.b, *r.a, *r.b, l.row, r.row, *b.c1, *b.c2};
  };

  std::size_t total = 0;
  for (const auto& b : blocks) total += b.left.size() * b.right.size();

  std::vector<AnalogyInstance> out;
  std::mt19937_64 rng(seed);
  constexpr std::size_t kEnumerateLimit = 4'000'000;
  if (total <= kEnumerateLimit) {
    std::vector<AnalogyInstance> all;
    for (const auto& b : blocks)
      for (const auto& l : b.left)
        for (const auto& r : b.right)
          if (auto x = make(b, l, r)) all.push_back(std::move(*x));
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end(),
                          [](const auto& a, const auto& b) { return form_tuple(a) == form_tuple(b); }),
              all.end());
    if (all.empty()) throw PipelineError("analogy sampling: the gold grid admits no valid instance");
    if (all.size() < n) {
      spdlog::warn("analogy sampling: only {} valid instances, fewer than the {} requested", all.size(), n);
      return all;
    }
    for (std::size_t i = 0; i < n; ++i) std::swap(all[i], all[i + rng() % (all.size() - i)]);
    all.resize(n);
    return all;
  }

  // Too many combinations to list: draw combinations uniformly and reject
  // invalid or repeated ones.
  std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
  const std::size_t max_draws = 50 * n + 1000;
  for (std::size_t draw = 0; draw < max_draws && out.size() < n; ++draw) {
    std::size_t idx = rng() % total;
    for (const auto& b : blocks) {
      const std::size_t size = b.left.size() * b.right.size();
      if (idx >= size) {
        idx -= size;
        continue;
      }
      if (auto x = make(b, b.left[idx / b.right.size()], b.right[idx % b.right.size()]))
        if (seen.emplace(x->f1, x->f2, x->f3, x->f4).second) out.push_back(std::move(*x));
      break;
    }
  }
  if (out.empty()) throw PipelineError("analogy sampling: the gold grid admits no valid instance");
  if (out.size() < n) spdlog::warn("analogy sampling: drew {} instances, fewer than the {} requested", out.size(), n);
  return out;
}

double analogy_accuracy(std::span<const AnalogyInstance> instances, const Grid& predicted, bool joint) {
  if (instances.empty()) throw std::invalid_argument("analogy_accuracy: no instances");
  const GridIndex pi(predicted, nullptr);
  std::size_t correct = 0;
  for (const auto& x : instances) {
    bool ok = false;
    if (!joint) {
      ok = intersects(pi.rows_of(x.f1), pi.rows_of(x.f2)) && intersects(pi.rows_of(x.f3), pi.rows_of(x.f4)) &&
           intersects(pi.cells_of(x.f1), pi.cells_of(x.f3)) && intersects(pi.cells_of(x.f2), pi.cells_of(x.f4));
    } else {
      const auto* o1 = pi.find(x.f1);
      const auto* o2 = pi.find(x.f2);
      const auto* o3 = pi.find(x.f3);
      const auto* o4 = pi.find(x.f4);
      if (o1 && o2 && o3 && o4)
        for (const auto& a : *o1)
          for (const auto& c : *o3) {
            if (a.cell != c.cell) continue;
            for (const auto& b : *o2) {
              if (b.row != a.row) continue;
              for (const auto& d : *o4)
                if (d.row == c.row && d.cell == b.cell) ok = true;
            }
          }
    }
    correct += ok;
  }
  return static_cast<double>(correct) / static_cast<double>(instances.size());
}

double lexicon_expansion(std::span<const AnalogyInstance> instances, const Grid& predicted) {
  if (instances.empty()) throw std::invalid_argument("lexicon_expansion: no instances");
  const auto forms = predicted.forms();
  std::size_t correct = 0;
  for (const auto& x : instances) correct += forms.count(x.f4);
  return static_cast<double>(correct) / static_cast<double>(instances.size());
}

MetricsReport evaluate(const Grid& predicted, const Grid& gold, const Lexicon& lexicon,
                       std::span<const AnalogyInstance> instances, bool joint_analogy) {
  const auto pdp = pdp_scores(predicted, gold, lexicon);
  MetricsReport report;
  report.f_par = pdp.f_par;
  report.f_cell = pdp.f_cell;
  report.f_grid = pdp.f_grid;
  report.per_form = pdp.per_form;
  report.instances = instances.size();
  if (!instances.empty()) {
    report.analogy = analogy_accuracy(instances, predicted, joint_analogy);
    report.lexicon_expansion = lexicon_expansion(instances, predicted);
  }
  return report;
}

MetricsReport mean_report(std::span<const MetricsReport> reports) {
  MetricsReport m;
  if (reports.empty()) return m;
  for (const auto& r : reports) {
    m.f_cell += r.f_cell;
    m.f_par += r.f_par;
    m.f_grid += r.f_grid;
    m.analogy += r.analogy;
    m.lexicon_expansion += r.lexicon_expansion;
    m.instances += r.instances;
  }
  const auto n = static_cast<double>(reports.size());
  m.f_cell /= n;
  m.f_par /= n;
  m.f_grid /= n;
  m.analogy /= n;
  m.lexicon_expansion /= n;
  m.instances /= reports.size();
  return m;
}

std::string MetricsReport::to_json(bool with_per_form) const {
  nlohmann::ordered_json j;
  j["F_cell"] = f_cell;
  j["F_par"] = f_par;
  j["F_grid"] = f_grid;
  j["analogy"] = analogy;
  j["lexicon_expansion"] = lexicon_expansion;
  j["instances"] = instances;
  if (with_per_form) {
    auto& list = j["per_form"] = nlohmann::ordered_json::array();
    for (const auto& f : per_form) list.push_back({{"form", f.form}, {"F_par", f.f_par}, {"F_cell", f.f_cell}});
  }
  return j.dump(2);
}

MetricsReport MetricsReport::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MetricsReport r;
    r.f_cell = j.at("F_cell").get<double>();
    r.f_par = j.at("F_par").get<double>();
    r.f_grid = j.at("F_grid").get<double>();
    r.analogy = j.at("analogy").get<double>();
    r.lexicon_expansion = j.at("lexicon_expansion").get<double>();
    r.instances = j.value("instances", std::size_t{0});
    if (j.contains("per_form"))
      for (const auto& f : j["per_form"])
        r.per_form.push_back({f.at("form").get<std::string>(), f.at("F_par").get<double>(),
                              f.at("F_cell").get<double>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad metrics report: ") + e.what());
  }
}

void MetricsReport::write_table(std::ostream& out) const {
  const std::pair<const char*, double> rows[] = {{"F_cell", f_cell},
                                                 {"F_par", f_par},
                                                 {"F_grid", f_grid},
                                                 {"Analogy", analogy},
                                                 {"Lexicon Expansion", lexicon_expansion}};
  std::ostringstream s;
  s << std::left << std::setw(20) << "metric" << std::right << std::setw(8) << "value" << '\n';
  for (const auto& [name, v] : rows)
    s << std::left << std::setw(20) << name << std::right << std::setw(8) << std::fixed << std::setprecision(4) << v
      << '\n';
  s << std::left << std::setw(20) << "analogy instances" << std::right << std::setw(8) << instances << '\n';
  out << s.str();
}

void write_analogies_tsv(std::ostream& out, std::span<const AnalogyInstance> instances) {
  for (const auto& x : instances) out << x.f1 << '\t' << x.f2 << '\t' << x.f3 << '\t' << x.f4 << '\n';
}

std::vector<AnalogyInstance> read_analogies_tsv(std::istream& in, const Grid& gold, const Lexicon& lexicon) {
  const GridIndex gi(gold, nullptr);
  std::vector<AnalogyInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, '\t');) f.push_back(field);
    if (f.size() != 4) throw FormatError("expected 4 tab-separated forms", lineno);
    std::optional<AnalogyInstance> found;
    const auto* o1 = gi.find(f[0]);
    const auto* o3 = gi.find(f[2]);
    if (o1 && o3)
      for (const auto& a : *o1)
        for (const auto& c : *o3) {
          if (found || a.cell != c.cell) continue;
          for (const auto& [cell, slot] : gold.rows[a.row].slots) {
            AnalogyInstance x{f[0], f[1], f[2], f[3], a.row, c.row, a.cell, cell};
            if (valid_instance(x, gold, lexicon)) {
              found = x;
              break;
            }
          }
        }
    if (!found) throw FormatError("analogy does not fit the gold grid: " + line, lineno);
    out.push_back(std::move(*found));
  }
  return out;
}

}  // namespace pdp
