#include "hypar/dyadic.hpp"

#include <set>

namespace hypar {

CellSet1D project1(const CellSet& a) {
  std::vector<std::int32_t> cols;
  for (const Cell& c : a.cells())
    if (cols.empty() || cols.back() != c.first) cols.push_back(c.first);
  return CellSet1D(a.resolution(), a.domain(), std::move(cols));
}

CellSet1D project2(const CellSet& a) {
  std::set<std::int32_t> rows;
  for (const Cell& c : a.cells()) rows.insert(c.second);
  return CellSet1D(a.resolution(), a.domain(),
                   std::vector<std::int32_t>(rows.begin(), rows.end()));
}

Rational fiber_length(const CellSet& a, std::int32_t p) {
  auto lo = std::lower_bound(a.cells().begin(), a.cells().end(),
                             Cell{p, std::numeric_limits<std::int32_t>::min()});
  auto hi = std::lower_bound(a.cells().begin(), a.cells().end(),
                             Cell{p + 1, std::numeric_limits<std::int32_t>::min()});
  return Rational(hi - lo, std::int64_t(1) << a.resolution());
}

CellSet cellset_from_tile(const Tile& t, int n, Domain dom) {
  require(t.h.n <= n && t.v.n <= n, "cellset_from_tile: resolution coarser than tile");
  std::vector<Cell> cells;
  std::int64_t p0 = t.h.m << (n - t.h.n), p1 = (t.h.m + 1) << (n - t.h.n);
  std::int64_t q0 = t.v.m << (n - t.v.n), q1 = (t.v.m + 1) << (n - t.v.n);
  for (std::int64_t p = p0; p < p1; ++p)
    for (std::int64_t q = q0; q < q1; ++q)
      cells.emplace_back(static_cast<std::int32_t>(p), static_cast<std::int32_t>(q));
  return CellSet(n, dom, std::move(cells));
}

Tile tile_containing(Cell c, int n, int j, int k) {
  require(j <= n && k <= n, "tile_containing: tile scale finer than resolution");
  // Arithmetic shift keeps floor semantics for signed-domain cells.
  std::int64_t hm = static_cast<std::int64_t>(c.first) >> (n - j);
  std::int64_t vm = static_cast<std::int64_t>(c.second) >> (n - k);
  return Tile{DyadicInterval(j, hm), DyadicInterval(k, vm)};
}

std::vector<std::pair<Tile, Tile>> whitney_pairs(const CellSet& a, int j, int k) {
  require(j <= a.resolution() && k <= a.resolution(), "whitney_pairs: scale finer than resolution");
  std::set<std::pair<std::int64_t, std::int64_t>> occupied;
  for (const Cell& c : a.cells()) {
    Tile t = tile_containing(c, a.resolution(), j, k);
    occupied.emplace(t.h.m, t.v.m);
  }
  // A related pair differs by 2 or 3 per axis, so scan a small neighborhood.
  std::vector<std::pair<Tile, Tile>> out;
  for (const auto& [hm, vm] : occupied) {
    for (std::int64_t dh = -3; dh <= 3; ++dh) {
      for (std::int64_t dv = -3; dv <= 3; ++dv) {
        std::int64_t hm2 = hm + dh, vm2 = vm + dv;
        if (std::make_pair(hm, vm) >= std::make_pair(hm2, vm2)) continue;
        if (!occupied.count({hm2, vm2})) continue;
        DyadicInterval h1(j, hm), h2(j, hm2), v1(k, vm), v2(k, vm2);
        if (whitney_related(h1, h2) && whitney_related(v1, v2))
          out.push_back({Tile{h1, v1}, Tile{h2, v2}});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hypar
