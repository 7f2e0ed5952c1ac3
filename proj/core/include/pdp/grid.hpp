#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace pdp {

/// One (paradigm, cell) position. Gold slots may hold several forms before
/// overabundance filtering; predicted slots flag forms the system generated.
struct Slot {
  std::vector<std::string> forms;
  bool predicted = false;

  bool operator==(const Slot&) const = default;
};

/// A paradigm: cell label -> slot. Empty slots are simply absent.
struct GridRow {
  std::map<std::string, Slot> slots;

  bool operator==(const GridRow&) const = default;
};

/// Rows are paradigms, columns are cells. The same type serves gold and
/// predicted grids; predicted grids label cells with their numeric ids.
struct Grid {
  std::vector<GridRow> rows;

  /// Every distinct form occupying any slot.
  std::set<std::string> forms() const;
  /// Every distinct cell label used by any row.
  std::set<std::string> cells() const;

  bool operator==(const Grid&) const = default;
};

/// One JSON object per row:
///   {"row_id": 0, "slots": {"V;PST": ["watched"]}}
/// With `with_flags`, rows also carry {"predicted": {"V;PST": false}}.
void write_grid_jsonl(std::ostream& out, const Grid& grid, bool with_flags = false);
Grid read_grid_jsonl(std::istream& in);

}  // namespace pdp
