#include "hypar/io.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>

namespace hypar {

using nlohmann::json;

void write_cellset(const CellSet& s, std::ostream& os) {
  json j;
  j["resolution"] = s.resolution();
  j["domain"] = s.domain() == Domain::Unit ? "unit" : "signed";
  json cells = json::array();
  for (const Cell& c : s.cells()) cells.push_back(json::array({c.first, c.second}));
  j["cells"] = std::move(cells);
  os << j.dump(1, ' ') << "\n";
}

CellSet read_cellset(std::istream& is) {
  json j;
  try {
    is >> j;
  } catch (const json::exception& ex) {
    throw input_error(std::string("cell set: invalid json: ") + ex.what());
  }
  try {
    int n = j.at("resolution").get<int>();
    std::string dom = j.at("domain").get<std::string>();
    if (dom != "unit" && dom != "signed") throw input_error("cell set: unknown domain");
    std::vector<Cell> cells;
    for (const auto& c : j.at("cells")) {
      if (!c.is_array() || c.size() != 2) throw input_error("cell set: malformed cell");
      cells.emplace_back(c[0].get<std::int32_t>(), c[1].get<std::int32_t>());
    }
    // The CellSet constructor enforces sortedness, uniqueness and domain.
    return CellSet(n, dom == "unit" ? Domain::Unit : Domain::Signed, std::move(cells));
  } catch (const json::exception& ex) {
    throw input_error(std::string("cell set: missing or mistyped field: ") + ex.what());
  }
}

CellSet read_cellset_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw input_error("cannot open set file: " + path);
  return read_cellset(is);
}

void write_cellset_file(const CellSet& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw input_error("cannot write set file: " + path);
  write_cellset(s, os);
}

void write_tile_cover(const TileCover& c, std::ostream& os) {
  json j;
  j["J"] = c.j;
  j["K"] = c.k;
  json entries = json::array();
  for (const auto& [delta, entry] : c.entries) {
    json e;
    e["delta_log2"] = delta;
    json tiles = json::array();
    for (const Tile& t : entry.tiles)
      tiles.push_back(json::array({t.h.n, t.h.m, t.v.n, t.v.m}));
    e["tiles"] = std::move(tiles);
    json cells = json::array();
    for (const Cell& cell : entry.residual.cells())
      cells.push_back(json::array({cell.first, cell.second}));
    e["residual_cells"] = std::move(cells);
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  os << j.dump(1, ' ') << "\n";
}

void write_tile_cover_csv(const TileCover& c, std::ostream& os) {
  os << "delta,tile_count,residual_measure\n";
  char buf[96];
  for (const auto& [delta, entry] : c.entries) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g\n", std::ldexp(1.0, -delta),
                  entry.tiles.size(), entry.residual.measure().to_double());
    os << buf;
  }
}

}  // namespace hypar
