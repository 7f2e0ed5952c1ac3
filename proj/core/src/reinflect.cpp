#include "pdp/reinflect.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "pdp/error.hpp"
#include "pdp/hash.hpp"
#include "pdp/utf8.hpp"

namespace pdp {

PairSplit make_pairs(std::span<const Paradigm> paradigms, std::uint64_t seed, double dev_fraction) {
  std::vector<std::size_t> multi;
  for (std::size_t i = 0; i < paradigms.size(); ++i)
    if (paradigms[i].size() >= 2) multi.push_back(i);
  if (multi.empty()) throw PipelineError("nothing to train on: no paradigm has two or more members");

  std::vector<std::size_t> shuffled = multi;
  std::mt19937_64 rng(seed);
  for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng() % i]);

  std::size_t n_dev = 0;
  if (multi.size() >= 2) {
    n_dev = static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(multi.size())));
    n_dev = std::clamp<std::size_t>(n_dev, 1, multi.size() - 1);
  }
  std::vector<bool> is_dev(paradigms.size(), false);
  for (std::size_t i = 0; i < n_dev; ++i) is_dev[shuffled[i]] = true;

  PairSplit split;
  for (const auto p : multi) {
    auto& dst = is_dev[p] ? split.dev : split.train;
    const auto& members = paradigms[p];
    for (const auto& a : members)
      for (const auto& b : members)
        if (a.cell != b.cell) dst.push_back({a.cell, a.form, b.cell, b.form});
  }
  return split;
}

RewriteModel train_rewriter(std::span<const ReinflectionInstance> train) {
  std::map<RewriteModel::CellPair, std::map<std::pair<std::string, std::string>, RewriteRule>> counts;
  for (const auto& inst : train) {
    const std::string forms[2] = {inst.source_form, inst.target_form};
    auto be = base(forms);
    auto& rule = counts[{inst.source_cell, inst.target_cell}][{be.exponents[0].key(), be.exponents[1].key()}];
    if (rule.count == 0) {
      rule.source = std::move(be.exponents[0]);
      rule.target = std::move(be.exponents[1]);
    }
    ++rule.count;
  }
  RewriteModel model;
  for (auto& [cells, by_key] : counts) {
    auto& list = model.rules[cells];
    for (auto& [key, rule] : by_key) list.push_back(std::move(rule));
    // by_key is already in key order, so a stable sort on count keeps it.
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  }
  return model;
}

std::pair<std::u32string, bool> strip_exponent(std::u32string_view form, const Exponent& exponent) {
  const auto& segs = exponent.segments;
  std::size_t lo = 0, hi = form.size();
  std::size_t first = 0, last = segs.size();
  if (!segs.empty() && segs.front().word_start) {
    const auto& t = segs.front().text;
    if (segs.front().word_end) {
      if (segs.size() != 1 || form != t) return {{}, false};
      return {{}, true};
    }
    if (form.substr(0, t.size()) != t) return {{}, false};
    lo = t.size();
    first = 1;
  }
  if (last > first && segs.back().word_end) {
    const auto& t = segs.back().text;
    if (hi - lo < t.size() || form.substr(hi - t.size(), t.size()) != t) return {{}, false};
    hi -= t.size();
    --last;
  }
  const auto middle = form.substr(lo, hi - lo);
  std::u32string out;
  std::size_t cursor = 0;
  for (std::size_t s = first; s < last; ++s) {
    const auto& seg = segs[s];
    const auto gap = static_cast<std::size_t>(seg.gap);
    if (gap < out.size()) return {{}, false};
    const std::size_t advance = gap - out.size();
    if (cursor + advance + seg.text.size() > middle.size()) return {{}, false};
    out.append(middle.substr(cursor, advance));
    cursor += advance;
    if (middle.substr(cursor, seg.text.size()) != seg.text) return {{}, false};
    cursor += seg.text.size();
  }
  out.append(middle.substr(cursor));
  return {out, true};
}

std::pair<std::u32string, bool> splice_exponent(std::u32string_view base, const Exponent& exponent) {
  std::u32string prefix, suffix, body;
  std::size_t taken = 0;
  for (const auto& seg : exponent.segments) {
    if (seg.word_start && seg.word_end) {
      if (!base.empty() || exponent.segments.size() != 1) return {{}, false};
      return {seg.text, true};
    }
    if (seg.word_start) {
      prefix = seg.text;
    } else if (seg.word_end) {
      suffix = seg.text;
    } else {
      const auto gap = static_cast<std::size_t>(seg.gap);
      if (gap < taken || gap > base.size()) return {{}, false};
      body.append(base.substr(taken, gap - taken));
      body.append(seg.text);
      taken = gap;
    }
  }
  body.append(base.substr(taken));
  return {prefix + body + suffix, true};
}

std::string apply(const RewriteModel& model, const std::string& source_form, int source_cell, int target_cell) {
  const auto found = model.rules.find({source_cell, target_cell});
  if (found == model.rules.end()) return source_form;
  const auto& rules = found->second;
  std::vector<const RewriteRule*> order;
  order.reserve(rules.size());
  for (const auto& r : rules) order.push_back(&r);
  // Rules are stored by count then key; a stable sort on length keeps that
  // as the tie-break.
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->source.length() > b->source.length(); });
  const auto form = utf8::decode(source_form);
  for (const auto* rule : order) {
    const auto [stem, stripped] = strip_exponent(form, rule->source);
    if (!stripped) continue;
    auto [out, spliced] = splice_exponent(stem, rule->target);
    if (!spliced || out.empty()) continue;
    return utf8::encode(out);
  }
  return source_form;
}

std::string RewriteModel::predict(const std::string& source_form, int source_cell, int target_cell) const {
  return apply(*this, source_form, source_cell, target_cell);
}

SourceRanking rank_sources(const Transducer& model, std::span<const ReinflectionInstance> dev,
                           std::span<const int> cells) {
  std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> tally;  // correct, total
  for (const auto& inst : dev) {
    auto& t = tally[{inst.source_cell, inst.target_cell}];
    if (model.predict(inst.source_form, inst.source_cell, inst.target_cell) == inst.target_form) ++t.first;
    ++t.second;
  }
  SourceRanking ranking;
  for (const auto& [key, t] : tally)
    ranking.accuracy[key] = static_cast<double>(t.first) / static_cast<double>(t.second);

  std::vector<int> all(cells.begin(), cells.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  for (const int target : all) {
    std::vector<int> sources;
    for (const int s : all)
      if (s != target) sources.push_back(s);
    std::stable_sort(sources.begin(), sources.end(), [&](int a, int b) {
      const auto ia = ranking.accuracy.find({a, target}), ib = ranking.accuracy.find({b, target});
      const double pa = ia == ranking.accuracy.end() ? 0.0 : ia->second;
      const double pb = ib == ranking.accuracy.end() ? 0.0 : ib->second;
      if (pa != pb) return pa > pb;
      const bool sa = ia != ranking.accuracy.end(), sb = ib != ranking.accuracy.end();
      return sa && !sb;
    });
    ranking.order[target] = std::move(sources);
  }
  return ranking;
}

Grid fill_grid(std::span<const Paradigm> paradigms, int k, const Transducer& model, const SourceRanking& ranking,
               SourceMode mode, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("fill_grid: k must be >= 1");
  Grid grid;
  grid.rows.reserve(paradigms.size());
  for (std::size_t r = 0; r < paradigms.size(); ++r) {
    const auto& paradigm = paradigms[r];
    std::map<int, const std::string*> attested;
    for (const auto& m : paradigm) {
      if (m.cell < 0 || m.cell >= k) throw std::invalid_argument("fill_grid: cell id outside [0, k)");
      attested.emplace(m.cell, &m.form);
    }
    GridRow row;
    if (attested.empty()) {
      grid.rows.push_back(std::move(row));
      continue;
    }
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    for (int c = 0; c < k; ++c) {
      const auto label = std::to_string(c);
      if (const auto a = attested.find(c); a != attested.end()) {
        row.slots[label] = Slot{{*a->second}, false};
        continue;
      }
      int source = attested.begin()->first;
      if (mode == SourceMode::random) {
        auto it = attested.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(rng() % attested.size()));
        source = it->first;
      } else if (const auto order = ranking.order.find(c); order != ranking.order.end()) {
        for (const int s : order->second)
          if (attested.count(s)) {
            source = s;
            break;
          }
      }
      row.slots[label] = Slot{{model.predict(*attested.at(source), source, c)}, true};
    }
    grid.rows.push_back(std::move(row));
  }
  return grid;
}

void write_ranking_tsv(std::ostream& out, const SourceRanking& ranking) {
  out << "target\trank\tsource\taccuracy\tseen\n";
  for (const auto& [target, sources] : ranking.order)
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const auto a = ranking.accuracy.find({sources[i], target});
      const bool seen = a != ranking.accuracy.end();
      out << target << '\t' << i + 1 << '\t' << sources[i] << '\t' << (seen ? a->second : 0.0) << '\t'
          << (seen ? 1 : 0) << '\n';
    }
}

void write_rules_tsv(std::ostream& out, const RewriteModel& model) {
  out << "source_cell\ttarget_cell\tsource_exponent\ttarget_exponent\tcount\n";
  for (const auto& [cells, rules] : model.rules)
    for (const auto& r : rules)
      out << cells.first << '\t' << cells.second << '\t' << r.source.display() << '\t' << r.target.display() << '\t'
          << r.count << '\n';
}

}  // namespace pdp
