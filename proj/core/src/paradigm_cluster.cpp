#include "pdp/paradigm_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pdp/error.hpp"

namespace pdp {

namespace {

std::vector<std::string> member_forms(const Paradigm& p) {
  std::vector<std::string> forms;
  forms.reserve(p.size());
  for (const auto& m : p) forms.push_back(m.form);
  return forms;
}

}  // namespace

long score(const Paradigm& paradigm) {
  if (paradigm.empty()) throw std::invalid_argument("score: empty paradigm");
  const auto forms = member_forms(paradigm);
  const auto be = base(forms);
  const auto b = static_cast<long>(be.base.size());
  long s = 0;
  for (const auto& x : be.exponents) s += b - static_cast<long>(x.length());
  return s;
}

double score_weighted(const Paradigm& paradigm, const std::function<double(const Exponent&, int)>& omega) {
  if (paradigm.empty()) throw std::invalid_argument("score_weighted: empty paradigm");
  const auto forms = member_forms(paradigm);
  const auto be = base(forms);
  const auto b = static_cast<double>(be.base.size());
  double s = 0;
  for (std::size_t i = 0; i < paradigm.size(); ++i)
    s += b - static_cast<double>(be.exponents[i].length()) * omega(be.exponents[i], paradigm[i].cell);
  return s;
}

double ExponentDistribution::p(int cell, const std::string& key) const {
  const auto c = prob.find(cell);
  if (c == prob.end()) return 0.0;
  const auto x = c->second.find(key);
  return x == c->second.end() ? 0.0 : x->second;
}

void ExponentDistribution::refresh_argmax() {
  argmax.clear();
  for (const auto& [cell, dist] : prob) {
    const std::string* best = nullptr;
    double best_p = -1;
    for (const auto& [key, p] : dist)
      if (p > best_p) {
        best_p = p;
        best = &key;
      }
    if (best) argmax[cell] = *best;
  }
}

ExponentDistribution exponent_distribution(std::span<const Paradigm> paradigms) {
  std::map<int, std::map<std::string, std::size_t>> counts;
  std::map<int, std::size_t> occupied;
  ExponentDistribution dist;
  for (const auto& p : paradigms) {
    if (p.empty()) continue;
    const auto be = base(member_forms(p));
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto key = be.exponents[i].key();
      ++counts[p[i].cell][key];
      ++occupied[p[i].cell];
      dist.display.emplace(key, be.exponents[i].display());
    }
  }
  for (const auto& [cell, by_key] : counts)
    for (const auto& [key, n] : by_key)
      dist.prob[cell][key] = static_cast<double>(n) / static_cast<double>(occupied[cell]);
  dist.refresh_argmax();
  return dist;
}

double penalty(const std::string& exponent_key, int cell, const ExponentDistribution& dist) {
  const auto top = dist.argmax.find(cell);
  if (top == dist.argmax.end()) return 2.0;
  if (top->second == exponent_key) return 0.0;
  const double max_p = dist.p(cell, top->second);
  return 2.0 - dist.p(cell, exponent_key) / max_p;
}

double score_penalized(const Paradigm& paradigm, const ExponentDistribution& dist) {
  return score_weighted(paradigm, [&](const Exponent& x, int cell) { return penalty(x.key(), cell, dist); });
}

EmbeddingCandidateIndex::EmbeddingCandidateIndex(const EmbeddingModel& model, const CellSets& cells)
    : model_(model), cells_(cells) {}

const std::vector<float>& EmbeddingCandidateIndex::unit_vector(const std::string& form) const {
  auto it = vectors_.find(form);
  if (it != vectors_.end()) return it->second;
  auto v = model_.vector(form);
  double norm = 0;
  for (float x : v) norm += static_cast<double>(x) * x;
  if (norm > 0)
    for (auto& x : v) x = static_cast<float>(x / std::sqrt(norm));
  return vectors_.emplace(form, std::move(v)).first->second;
}

std::vector<std::string> EmbeddingCandidateIndex::candidates(const std::string& form, int cell, std::size_t n) const {
  const auto members = cells_.find(cell);
  if (members == cells_.end()) return {};
  const auto key = std::make_pair(form, cell);
  auto cached = lists_.find(key);
  if (cached != lists_.end() && cached->second.size() >= std::min(n, members->second.size())) {
    auto out = cached->second;
    if (out.size() > n) out.resize(n);
    return out;
  }
  const auto query = unit_vector(form);
  std::vector<std::pair<double, const std::string*>> scored;
  scored.reserve(members->second.size());
  for (const auto& c : members->second) {
    const auto& v = unit_vector(c);
    double dot = 0;
    for (std::size_t d = 0; d < v.size(); ++d) dot += static_cast<double>(query[d]) * v[d];
    scored.emplace_back(dot, &c);
  }
  const std::size_t take = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                    [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : *a.second < *b.second; });
  std::vector<std::string> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(*scored[i].second);
  lists_[key] = out;
  return out;
}

std::vector<Paradigm> cluster_pass(const CellSets& cells, const ScoreFn& score_fn, const CandidateIndex* index,
                                   std::size_t n) {
  if (n == 0) throw std::invalid_argument("cluster_pass: n must be >= 1");
  std::vector<int> order;
  std::map<int, std::set<std::string>> remaining;
  for (const auto& [cell, forms] : cells) {
    order.push_back(cell);
    remaining[cell].insert(forms.begin(), forms.end());
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto sa = remaining[a].size(), sb = remaining[b].size();
    return sa != sb ? sa > sb : a < b;
  });

  std::vector<Paradigm> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int ci = order[i];
    const std::vector<std::string> seeds(remaining[ci].begin(), remaining[ci].end());
    for (const auto& seed : seeds) {
      if (!remaining[ci].erase(seed)) continue;
      Paradigm paradigm{{ci, seed}};
      double s = score_fn(paradigm);
      for (std::size_t j = i + 1; j < order.size(); ++j) {
        const int cj = order[j];
        auto& pool = remaining[cj];
        if (pool.empty()) continue;
        std::vector<std::string> candidates;
        if (index) {
          for (auto& c : index->candidates(seed, cj, n))
            if (pool.count(c)) candidates.push_back(std::move(c));
          std::sort(candidates.begin(), candidates.end());
        } else {
          candidates.assign(pool.begin(), pool.end());
        }
        // Candidates are sorted, so keeping the first maximum breaks ties
        // towards the lexicographically smallest form.
        const std::string* best = nullptr;
        double best_score = 0;
        for (const auto& c : candidates) {
          paradigm.push_back({cj, c});
          const double sc = score_fn(paradigm);
          paradigm.pop_back();
          if (!best || sc > best_score) {
            best = &c;
            best_score = sc;
          }
        }
        if (best && best_score > s) {
          paradigm.push_back({cj, *best});
          s = best_score;
          pool.erase(*best);
        }
      }
      out.push_back(std::move(paradigm));
    }
  }
  return out;
}

ParadigmResult cluster_paradigms(const CellSets& cells, const CandidateIndex* index, const ParadigmConfig& config) {
  ParadigmResult result;
  result.first_pass = cluster_pass(cells, [](const Paradigm& p) { return static_cast<double>(score(p)); }, index,
                                   config.neighbors);
  result.distribution = exponent_distribution(result.first_pass);
  if (config.single_pass) {
    result.paradigms = result.first_pass;
    return result;
  }
  std::function<double(const Exponent&, int)> omega;
  switch (config.omega) {
    case OmegaMode::heuristic:
      omega = [&dist = result.distribution](const Exponent& x, int cell) { return penalty(x.key(), cell, dist); };
      break;
    case OmegaMode::const1:
      omega = [](const Exponent&, int) { return 1.0; };
      break;
    case OmegaMode::const0:
      omega = [](const Exponent&, int) { return 0.0; };
      break;
  }
  result.paradigms =
      cluster_pass(cells, [&](const Paradigm& p) { return score_weighted(p, omega); }, index, config.neighbors);
  return result;
}

void write_paradigms_jsonl(std::ostream& out, std::span<const Paradigm> paradigms) {
  using nlohmann::json;
  for (std::size_t i = 0; i < paradigms.size(); ++i) {
    json members = json::array();
    for (const auto& m : paradigms[i]) members.push_back({{"cell", m.cell}, {"form", m.form}});
    out << json{{"paradigm_id", i}, {"members", std::move(members)}}.dump() << '\n';
  }
}

std::vector<Paradigm> read_paradigms_jsonl(std::istream& in) {
  using nlohmann::json;
  std::vector<Paradigm> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto rec = json::parse(line);
      Paradigm p;
      for (const auto& m : rec.at("members")) p.push_back({m.at("cell").get<int>(), m.at("form").get<std::string>()});
      if (p.empty()) throw FormatError("paradigm without members", lineno);
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad paradigm record: ") + e.what(), lineno);
    }
  }
  return out;
}

void write_exponents_tsv(std::ostream& out, const ExponentDistribution& dist) {
  out << "cell\texponent\tp\n";
  for (const auto& [cell, by_key] : dist.prob) {
    std::vector<std::pair<double, std::string>> rows;
    for (const auto& [key, p] : by_key) rows.emplace_back(p, key);
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [p, key] : rows) {
      std::ostringstream line;
      line.precision(6);
      line << cell << '\t' << dist.display.at(key) << '\t' << p;
      out << line.str() << '\n';
    }
  }
}

}  // namespace pdp
