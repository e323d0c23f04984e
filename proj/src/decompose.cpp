#include "hypar/decompose.hpp"

#include <bit>
#include <set>

namespace hypar {

namespace {

// Exact test of  cnt * 2^-shift >= 2^(-i*C)  for C = cn/cd, cnt >= 0.
// Equivalent to cnt^cd >= 2^(cd*shift - i*cn); all quantities fit 128 bits
// for cnt <= 2^16 and cd <= 7.
bool weight_at_least(std::int64_t cnt, int shift, int i, const Rational& c) {
  if (cnt <= 0) return false;
  const std::int64_t cn = c.num, cd = c.den;
  std::int64_t e = cd * shift - static_cast<std::int64_t>(i) * cn;
  if (e <= 0) return true;
  if (e >= 120) return false;
  unsigned __int128 lhs = 1;
  for (std::int64_t k = 0; k < cd; ++k) lhs *= static_cast<unsigned __int128>(cnt);
  return lhs >= (static_cast<unsigned __int128>(1) << e);
}

// Exact test of  2^-l >= 2^(-i*C) * 2^-scale,  i.e. l*cd <= i*cn + scale*cd.
bool length_qualifies(int l, int scale, int i, const Rational& c) {
  return static_cast<std::int64_t>(l) * c.den <=
         static_cast<std::int64_t>(i) * c.num + static_cast<std::int64_t>(scale) * c.den;
}

std::int64_t floor_div_pow2(std::int64_t v, int sh) { return v >> sh; }

}  // namespace

int dyadic_bin(const Rational& m) {
  if (!(m > Rational(0))) throw input_error("dyadic_bin: measure must be positive");
  // m = cnt / 2^n with both exact; the bin is n - ceil(log2 cnt) shifted so
  // that m in (2^-(L+1), 2^-L].
  std::int64_t num = m.num, den = m.den;
  require(std::has_single_bit(static_cast<std::uint64_t>(den)), "dyadic_bin: non-dyadic measure");
  int n = std::countr_zero(static_cast<std::uint64_t>(den));
  int ceil_log2 = static_cast<int>(std::bit_width(static_cast<std::uint64_t>(num - 1)));
  return n - ceil_log2;
}

FiberDecomposition fiber_slice(const CellSet& omega) {
  if (omega.domain() != Domain::Unit)
    throw input_error("fiber_slice: decomposition runs on the unit domain");
  FiberDecomposition fd;
  fd.source = omega;
  const int n = omega.resolution();
  std::map<int, std::vector<Cell>> buckets;
  const auto& cells = omega.cells();
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t jx = i;
    while (jx < cells.size() && cells[jx].first == cells[i].first) ++jx;
    std::int64_t cnt = static_cast<std::int64_t>(jx - i);
    int kbin = n - static_cast<int>(std::bit_width(static_cast<std::uint64_t>(cnt - 1)));
    auto& b = buckets[kbin];
    b.insert(b.end(), cells.begin() + i, cells.begin() + jx);
    i = jx;
  }
  for (auto& [k, cs] : buckets) fd.parts.emplace(k, CellSet(n, omega.domain(), std::move(cs)));
  return fd;
}

int choose_j(const CellSet& omega) {
  if (omega.empty()) throw input_error("choose_j: empty set");
  return dyadic_bin(project1(omega).measure());
}

std::optional<DyadicInterval> maximal_interval(const CellSet1D& s, std::int32_t cell,
                                               const DyadicParam& eta, const Rational& c) {
  if (!s.contains(cell)) throw input_error("maximal_interval: cell not in set");
  const int n = s.resolution();
  for (int l = 0; l <= n; ++l) {
    std::int64_t m = floor_div_pow2(cell, n - l);
    if (!DyadicInterval(l, m).in_domain(s.domain())) continue;
    std::int64_t cnt = s.count_in(l, m);
    // density |I cap S| / |I| = cnt * 2^-(n-l)
    if (weight_at_least(cnt, n - l, eta.i, c)) return DyadicInterval(l, m);
  }
  return std::nullopt;
}

AxisStrata stratify_axis(const CellSet1D& s, int scale, const StructureConfig& cfg, int cap_log2) {
  cfg.validate();
  const int n = s.resolution();
  const int imin = cfg.eps_min_log2;
  AxisStrata out;
  out.scale = scale;
  out.cap_log2 = cap_log2;
  std::map<int, std::vector<std::int32_t>> levels;
  std::vector<std::int32_t> residual;

  for (std::int32_t cell : s.cells()) {
    // Density profile against every ancestor, once per cell.
    std::vector<std::int64_t> cnt(n + 1, 0);
    for (int l = 0; l <= n; ++l) cnt[l] = s.count_in(l, floor_div_pow2(cell, n - l));
    int assigned = -1;
    for (int i = 0; i <= imin; ++i) {
      // Largest ancestor whose density reaches (2^-i)^C.
      int lstar = -1;
      for (int l = 0; l <= n; ++l) {
        if (weight_at_least(cnt[l], n - l, i, cfg.c)) {
          lstar = l;
          break;
        }
      }
      if (lstar >= 0 && length_qualifies(lstar, scale, i, cfg.c)) {
        assigned = i;
        break;
      }
    }
    if (assigned < 0)
      residual.push_back(cell);
    else
      levels[std::max(assigned, cap_log2)].push_back(cell);
  }
  for (auto& [i, cells] : levels) out.strata.emplace(i, CellSet1D(n, s.domain(), std::move(cells)));
  out.residual = CellSet1D(n, s.domain(), std::move(residual));
  return out;
}

std::vector<DyadicInterval> interval_cover(const CellSet1D& s_eta, int scale,
                                           const DyadicParam& eta, const StructureConfig& cfg) {
  cfg.validate();
  const int n = s_eta.resolution();
  require(scale <= n, "interval_cover: scale finer than resolution");
  std::set<std::int64_t> anchors;
  for (std::int32_t cell : s_eta.cells()) anchors.insert(floor_div_pow2(cell, n - scale));
  std::vector<DyadicInterval> out;
  for (std::int64_t m : anchors) out.emplace_back(scale, m);

  // Count guard: a_cover * eta^-2C intervals, times the mass of the set in
  // units of 2^-scale when it exceeds one such interval.
  double mass_units = std::ceil(s_eta.measure().to_double() * std::ldexp(1.0, scale));
  double bound = cfg.a_cover * std::pow(eta.value(), -2.0 * cfg.c.to_double()) *
                 std::max(1.0, mass_units);
  if (static_cast<double>(out.size()) > bound)
    throw invariant_error("interval_cover: count bound violated");
  return out;
}

namespace {

CellSet cells_over_columns(const CellSet& part, const CellSet1D& cols) {
  std::vector<Cell> cells;
  for (const Cell& c : part.cells())
    if (cols.contains(c.first)) cells.push_back(c);
  return CellSet(part.resolution(), part.domain(), std::move(cells));
}

CellSet cells_over_rows(const CellSet& part, const std::set<std::int32_t>& rows) {
  std::vector<Cell> cells;
  for (const Cell& c : part.cells())
    if (rows.count(c.second)) cells.push_back(c);
  return CellSet(part.resolution(), part.domain(), std::move(cells));
}

}  // namespace

StageResult stage1(const CellSet& part, int j, const StructureConfig& cfg) {
  StageResult out;
  out.residual = CellSet(part.resolution(), part.domain(), {});
  if (part.empty()) return out;
  AxisStrata ax = stratify_axis(project1(part), j, cfg, 0);
  for (const auto& [i, s_eta] : ax.strata) {
    Stratum st;
    st.eta_log2 = i;
    st.body = cells_over_columns(part, s_eta);
    out.strata.push_back(std::move(st));
  }
  out.residual = cells_over_columns(part, ax.residual);
  return out;
}

StageResult stage2(const Stratum& s1, int j, const StructureConfig& cfg) {
  cfg.validate();
  StageResult out;
  const CellSet& body = s1.body;
  out.residual = CellSet(body.resolution(), body.domain(), {});
  if (body.empty()) return out;
  const int n = body.resolution();

  std::map<std::int32_t, std::int64_t> row_count;
  for (const Cell& c : body.cells()) ++row_count[c.second];

  std::map<int, std::set<std::int32_t>> levels;
  std::set<std::int32_t> residual_rows;
  for (const auto& [q, cnt] : row_count) {
    // Row length against rho^C 2^-j, smallest qualifying rho on the ladder.
    int assigned = -1;
    for (int i = 0; i <= cfg.eps_min_log2; ++i) {
      if (weight_at_least(cnt, n - j, i, cfg.c)) {
        assigned = i;
        break;
      }
    }
    if (assigned < 0)
      residual_rows.insert(q);
    else
      levels[std::max(assigned, s1.eta_log2)].insert(q);
  }
  for (const auto& [i, rows] : levels) {
    Stratum st;
    st.eta_log2 = s1.eta_log2;
    st.rho_log2 = i;
    st.body = cells_over_rows(body, rows);
    out.strata.push_back(std::move(st));
  }
  out.residual = cells_over_rows(body, residual_rows);
  return out;
}

StageResult stage3(const Stratum& s2, int k, const StructureConfig& cfg) {
  StageResult out;
  const CellSet& body = s2.body;
  out.residual = CellSet(body.resolution(), body.domain(), {});
  if (body.empty()) return out;
  AxisStrata ax = stratify_axis(project2(body), k, cfg, s2.rho_log2);
  for (const auto& [i, s_delta] : ax.strata) {
    Stratum st;
    st.eta_log2 = s2.eta_log2;
    st.rho_log2 = s2.rho_log2;
    st.delta_log2 = i;
    std::set<std::int32_t> rows(s_delta.cells().begin(), s_delta.cells().end());
    st.body = cells_over_rows(body, rows);
    out.strata.push_back(std::move(st));
  }
  std::set<std::int32_t> rrows(ax.residual.cells().begin(), ax.residual.cells().end());
  out.residual = cells_over_rows(body, rrows);
  return out;
}

TileCover tile_cover(const CellSet& part, const StructureConfig& cfg) {
  cfg.validate();
  if (part.empty()) return TileCover{};
  const int n = part.resolution();

  // The part must have constant fiber bin; that bin is K.
  int kbin = -1;
  for (std::int32_t p : project1(part).cells()) {
    int b = dyadic_bin(fiber_length(part, p));
    if (kbin < 0) kbin = b;
    if (b != kbin) throw input_error("tile_cover: fibers span more than one bin");
  }
  const int j = choose_j(part);

  TileCover cover;
  cover.j = j;
  cover.k = kbin;
  cover.unstratified = CellSet(n, part.domain(), {});

  std::map<int, std::vector<Tile>> tiles_by_delta;
  std::map<int, CellSet> body_by_delta;

  AxisStrata ax1 = stratify_axis(project1(part), j, cfg, 0);
  StageResult st1 = stage1(part, j, cfg);
  cover.unstratified = set_union(cover.unstratified, st1.residual);

  for (const Stratum& s1 : st1.strata) {
    std::vector<DyadicInterval> cover1 =
        interval_cover(ax1.strata.at(s1.eta_log2), j, DyadicParam(s1.eta_log2), cfg);
    StageResult st2 = stage2(s1, j, cfg);
    cover.unstratified = set_union(cover.unstratified, st2.residual);
    for (const Stratum& s2 : st2.strata) {
      AxisStrata ax3 = stratify_axis(project2(s2.body), kbin, cfg, s2.rho_log2);
      StageResult st3 = stage3(s2, kbin, cfg);
      cover.unstratified = set_union(cover.unstratified, st3.residual);
      for (const Stratum& s3 : st3.strata) {
        std::vector<DyadicInterval> cover3 =
            interval_cover(ax3.strata.at(s3.delta_log2), kbin, DyadicParam(s3.delta_log2), cfg);
        auto [it, fresh] = body_by_delta.try_emplace(s3.delta_log2, s3.body);
        if (!fresh) it->second = set_union(it->second, s3.body);
        auto& tl = tiles_by_delta[s3.delta_log2];
        for (const DyadicInterval& ih : cover1)
          for (const DyadicInterval& iv : cover3) tl.push_back(Tile{ih, iv});
      }
    }
  }

  for (auto& [delta, tl] : tiles_by_delta) {
    std::sort(tl.begin(), tl.end());
    tl.erase(std::unique(tl.begin(), tl.end()), tl.end());
    TileCoverEntry entry;
    entry.tiles = std::move(tl);
    entry.residual = body_by_delta.at(delta);
    cover.entries.emplace(delta, std::move(entry));
  }
  return cover;
}

bool tile_cover_is_partition(const TileCover& cover, const CellSet& part) {
  CellSet acc = cover.unstratified;
  std::size_t total = acc.size();
  for (const auto& [delta, entry] : cover.entries) {
    total += entry.residual.size();
    acc = set_union(acc, entry.residual);
  }
  return total == part.size() && acc == part;
}

bool tile_cover_contained(const TileCover& cover) {
  for (const auto& [delta, entry] : cover.entries) {
    const int n = entry.residual.resolution();
    for (const Cell& c : entry.residual.cells()) {
      bool inside = false;
      for (const Tile& t : entry.tiles) {
        std::int64_t hm = static_cast<std::int64_t>(c.first) >> (n - t.h.n);
        std::int64_t vm = static_cast<std::int64_t>(c.second) >> (n - t.v.n);
        if (hm == t.h.m && vm == t.v.m) {
          inside = true;
          break;
        }
      }
      if (!inside) return false;
    }
  }
  return true;
}

}  // namespace hypar
