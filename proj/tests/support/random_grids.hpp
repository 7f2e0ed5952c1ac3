#pragma once

// Random gold/predicted grid pairs for property tests.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pdp/grid.hpp"
#include "pdp/ingest.hpp"

namespace fixture {

struct GridCase {
  pdp::Grid gold;
  pdp::Grid predicted;
  pdp::Lexicon lexicon;
  std::set<std::string> lexicon_forms;
};

inline pdp::Lexicon lexicon_of(const std::set<std::string>& forms) {
  pdp::Lexicon lex;
  lex.pos = "X";
  for (const auto& f : forms) lex.entries[f] = 1;
  return lex;
}

/// One to three letters from a small alphabet, so forms repeat across slots.
inline std::string random_form(std::mt19937_64& rng) {
  std::string s;
  const auto len = 1 + rng() % 3;
  for (std::size_t i = 0; i < len; ++i) s += "abcdefgh"[rng() % 8];
  return s;
}

/// About one slot in six is left empty.
inline pdp::Grid random_grid(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                             const std::vector<std::string>& pool) {
  pdp::Grid g;
  for (std::size_t r = 0; r < rows; ++r) {
    pdp::GridRow row;
    for (std::size_t c = 0; c < cols; ++c) {
      if (rng() % 6 == 0) continue;
      row.slots[std::to_string(c)] = pdp::Slot{{pool[rng() % pool.size()]}, false};
    }
    g.rows.push_back(row);
  }
  return g;
}

/// Gold and predicted grids over one form pool; the lexicon is a nonempty
/// random subset of the gold forms.
inline GridCase random_case(std::mt19937_64& rng) {
  GridCase c;
  std::vector<std::string> pool;
  const auto n = 6 + rng() % 20;
  for (std::size_t i = 0; i < n; ++i) pool.push_back(random_form(rng));
  do c.gold = random_grid(rng, 2 + rng() % 6, 2 + rng() % 4, pool);
  while (c.gold.forms().empty());
  for (const auto& f : c.gold.forms())
    if (rng() % 3 != 0) c.lexicon_forms.insert(f);
  if (c.lexicon_forms.empty()) c.lexicon_forms.insert(*c.gold.forms().begin());
  c.lexicon = lexicon_of(c.lexicon_forms);
  c.predicted = random_grid(rng, 1 + rng() % 7, 1 + rng() % 5, pool);
  return c;
}

/// Shuffles rows and renames columns.
inline pdp::Grid permuted(const pdp::Grid& g, std::mt19937_64& rng) {
  const auto cells = g.cells();
  std::vector<std::string> names(cells.begin(), cells.end());
  std::vector<std::string> renamed = names;
  std::shuffle(renamed.begin(), renamed.end(), rng);
  std::map<std::string, std::string> rename;
  for (std::size_t i = 0; i < names.size(); ++i) rename[names[i]] = "x" + renamed[i];
  pdp::Grid out;
  for (const auto& row : g.rows) {
    pdp::GridRow r;
    for (const auto& [cell, slot] : row.slots) r.slots[rename[cell]] = slot;
    out.rows.push_back(r);
  }
  std::shuffle(out.rows.begin(), out.rows.end(), rng);
  return out;
}

}  // namespace fixture
