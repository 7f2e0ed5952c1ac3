#include "pdp/grid.hpp"

#include <istream>
#include <ostream>

#include "json.hpp"
#include "pdp/error.hpp"

namespace pdp {

using nlohmann::json;

std::set<std::string> Grid::forms() const {
  std::set<std::string> out;
  for (const auto& row : rows)
    for (const auto& [cell, slot] : row.slots) out.insert(slot.forms.begin(), slot.forms.end());
  return out;
}

std::set<std::string> Grid::cells() const {
  std::set<std::string> out;
  for (const auto& row : rows)
    for (const auto& [cell, slot] : row.slots) out.insert(cell);
  return out;
}

void write_grid_jsonl(std::ostream& out, const Grid& grid, bool with_flags) {
  for (std::size_t i = 0; i < grid.rows.size(); ++i) {
    json slots = json::object();
    json flags = json::object();
    for (const auto& [cell, slot] : grid.rows[i].slots) {
      slots[cell] = slot.forms;
      flags[cell] = slot.predicted;
    }
    json rec = {{"row_id", i}, {"slots", std::move(slots)}};
    if (with_flags) rec["predicted"] = std::move(flags);
    out << rec.dump() << '\n';
  }
}

Grid read_grid_jsonl(std::istream& in) {
  Grid grid;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      GridRow row;
      for (const auto& [cell, forms] : rec.at("slots").items())
        row.slots[cell].forms = forms.get<std::vector<std::string>>();
      if (rec.contains("predicted"))
        for (const auto& [cell, flag] : rec.at("predicted").items())
          if (auto it = row.slots.find(cell); it != row.slots.end()) it->second.predicted = flag.get<bool>();
      const auto id = rec.at("row_id").get<std::size_t>();
      if (id != grid.rows.size()) throw FormatError("row_id out of sequence", lineno);
      grid.rows.push_back(std::move(row));
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad grid record: ") + e.what(), lineno);
    }
  }
  return grid;
}

}  // namespace pdp
