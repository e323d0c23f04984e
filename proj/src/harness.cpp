#include "hypar/harness.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

#include "hypar/rng.hpp"

namespace hypar {

// --- slab decomposition -----------------------------------------------------

SlabDecomposition slab_decompose(const CellSet& tau, int axis, int kmax) {
  if (axis != 1 && axis != 2) throw input_error("slab_decompose: axis must be 1 or 2");
  if (tau.domain() != Domain::Signed)
    throw input_error("slab_decompose: centered sets live in the signed domain");
  if (tau.empty()) throw input_error("slab_decompose: empty set");
  const int n = tau.resolution();

  auto coord = [axis](const Cell& c) { return axis == 1 ? c.first : c.second; };
  std::int32_t lo = coord(tau.cells()[0]), hi = lo;
  for (const Cell& c : tau.cells()) {
    lo = std::min(lo, coord(c));
    hi = std::max(hi, coord(c));
  }
  if (lo != -(hi + 1))
    throw input_error("slab_decompose: set is not centered on the chosen axis");

  std::map<int, std::vector<Cell>> bands;
  std::vector<Cell> core;
  for (const Cell& c : tau.cells()) {
    std::int64_t v = coord(c);
    std::int64_t outer = v >= 0 ? v + 1 : -v;  // sup of |xi_axis| over the cell, in units 2^-n
    int k = n - static_cast<int>(std::bit_width(static_cast<std::uint64_t>(outer - 1)));
    if (k < 0) throw invariant_error("slab_decompose: cell outside the unit band");
    if (k > kmax)
      core.push_back(c);
    else
      bands[k].push_back(c);
  }

  SlabDecomposition out;
  for (int k = 0; k <= kmax; ++k) {
    auto it = bands.find(k);
    std::vector<Cell> cells = it == bands.end() ? std::vector<Cell>{} : std::move(it->second);
    out.bands.emplace_back(k, CellSet(n, tau.domain(), std::move(cells)));
  }
  out.core = CellSet(n, tau.domain(), std::move(core));
  return out;
}

// --- fits ---------------------------------------------------------------------

void fit_line(const std::vector<double>& x, const std::vector<double>& y, double& slope,
              double& intercept, double& residual) {
  if (x.size() != y.size() || x.size() < 3) throw input_error("fit_line: need at least 3 rows");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  if (det == 0) throw input_error("fit_line: degenerate abscissae");
  slope = (n * sxy - sx * sy) / det;
  intercept = (sy - slope * sx) / n;
  residual = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = y[i] - (slope * x[i] + intercept);
    residual += d * d;
  }
  residual = std::sqrt(residual / n);
}

// --- bilinear exponent scan ----------------------------------------------------

ScanResult scan_bilinear_exponent(const ExponentPair& e,
                                  const std::vector<std::pair<int, int>>& range,
                                  const SpacetimeGrid& grid, const QuadratureSpec& quad,
                                  int threads) {
  if (range.size() < 3) throw input_error("scan: degenerate range");
  ScanResult res;
  const double inv_r = (Rational(1) / e.r).to_double();
  const double p2s = e.two_s().to_double();
  std::vector<double> xs, ys;
  for (auto [j, k] : range) {
    if (j < 1 || k < 1) throw input_error("scan: separated pairs need j,k >= 1");
    const int n = std::max(j, k);
    // Canonical pair: gap 2^-j horizontally and 2^-k vertically, symmetric
    // about the origin; every row is the parabolic rescale of the (1,1) row.
    CellSet tau = cellset_from_tile(Tile{DyadicInterval(j, -2), DyadicInterval(k, -2)}, n,
                                    Domain::Signed);
    CellSet taup =
        cellset_from_tile(Tile{DyadicInterval(j, 0), DyadicInterval(k, 0)}, n, Domain::Signed);
    SpacetimeGrid grow = matched_grid(grid, j - 1, k - 1);
    Field f1 = extend(Density(tau), grow, quad, threads);
    Field f2 = extend(Density(taup), grow, quad, threads);
    double lhs = product_lp_norm({&f1, &f2}, e.s.to_double());
    double bound = lp_norm(f1, p2s) * lp_norm(f2, p2s);
    double denom = std::pow(tau.measure().to_double() * taup.measure().to_double(), inv_r);
    ScanResult::Row row;
    row.params = {static_cast<double>(j), static_cast<double>(k)};
    row.norm = lhs;
    row.ratio_log2 = std::log2(lhs / denom);
    row.cs_slack = bound - lhs;
    res.rows.push_back(row);
    xs.push_back(static_cast<double>(j + k));
    ys.push_back(row.ratio_log2);
  }
  fit_line(xs, ys, res.slope, res.intercept, res.residual);
  return res;
}

// --- decay across fiber bins -----------------------------------------------------

DecayPair make_hard_case_pair(int gap) {
  if (gap < 0) throw input_error("decay pair: gap must be nonnegative");
  DecayPair p;
  if (gap == 0) {
    // Equal bins: the top and bottom halves of the centered square.
    p.k1 = p.k2 = 1;
    p.j1 = p.j2 = 0;
    const int n = 1;
    std::vector<Cell> top, bottom;
    for (std::int32_t x = -2; x < 2; ++x) {
      top.emplace_back(x, 0);
      bottom.emplace_back(x, -1);
    }
    p.set1 = CellSet(n, Domain::Signed, std::move(top));
    p.set2 = CellSet(n, Domain::Signed, std::move(bottom));
    return p;
  }
  // Tall narrow bar (fiber ~ 1, width 2^-gap) crossing a short wide bar
  // (fiber ~ 2^-gap, width 1); the wide bar gives up the crossing columns so
  // the two sets stay disjoint.
  p.k1 = 0;
  p.j1 = gap;
  p.k2 = gap;
  p.j2 = 0;
  const int n = gap + 1;
  auto bar = [n](int half_w_log2, int half_h_log2) {
    std::vector<Cell> cells;
    std::int32_t pw = std::int32_t(1) << (n - half_w_log2 - 1);
    std::int32_t ph = std::int32_t(1) << (n - half_h_log2 - 1);
    for (std::int32_t x = -pw; x < pw; ++x)
      for (std::int32_t y = -ph; y < ph; ++y) cells.emplace_back(x, y);
    return CellSet(n, Domain::Signed, std::move(cells));
  };
  p.set1 = bar(gap, 0);  // [-2^-(gap+1), 2^-(gap+1)] x [-1/2, 1/2]
  CellSet wide = bar(0, gap);
  std::vector<Cell> keep;
  for (const Cell& c : wide.cells())
    if (c.first < -1 || c.first > 0) keep.push_back(c);  // drop the crossing strip
  p.set2 = CellSet(n, Domain::Signed, std::move(keep));
  return p;
}

DecayFit fit_decay_c0(const std::vector<DecayPair>& pairs, const ExponentPair& e,
                      const SpacetimeGrid& grid, const QuadratureSpec& quad, int threads) {
  bool hard_case = false;
  for (const DecayPair& p : pairs)
    if (p.k1 < p.k2 && p.j1 > p.j2) hard_case = true;
  if (!hard_case) throw input_error("fit_decay_c0: no hard-case pairs (K < K', J > J')");

  DecayFit fit;
  const double p2s = e.two_s().to_double();
  const double two_over_sp = (Rational(2) / e.s_prime()).to_double();
  std::vector<double> xs, ys;
  for (const DecayPair& p : pairs) {
    Field f1 = extend(Density(p.set1), grid, quad, threads);
    Field f2 = extend(Density(p.set2), grid, quad, threads);
    DecayFit::Row row;
    row.k1 = p.k1;
    row.k2 = p.k2;
    row.j1 = p.j1;
    row.j2 = p.j2;
    row.lhs = product_lp_norm({&f1, &f2}, e.s.to_double());
    double mx = std::max(p.set1.measure().to_double(), p.set2.measure().to_double());
    row.rhs0 = std::pow(mx, two_over_sp);
    row.cs_slack = lp_norm(f1, p2s) * lp_norm(f2, p2s) - row.lhs;
    fit.pairs.push_back(row);
    xs.push_back(std::abs(p.k2 - p.k1));
    ys.push_back(std::log2(row.lhs / row.rhs0));
  }
  double slope, intercept, residual;
  fit_line(xs, ys, slope, intercept, residual);
  fit.c0_hat = -slope;
  fit.monotone_steps = 0;
  for (std::size_t i = 0; i + 1 < fit.pairs.size(); ++i) {
    if (fit.pairs[i + 1].lhs / fit.pairs[i + 1].rhs0 < fit.pairs[i].lhs / fit.pairs[i].rhs0)
      ++fit.monotone_steps;
    else
      break;
  }
  return fit;
}

// --- decoupling ------------------------------------------------------------------

DecoupleReport check_decoupling(const std::map<int, CellSet>& family, const DyadicParam& delta,
                                const ExponentPair& e, const SpacetimeGrid& grid, int a_sep,
                                const QuadratureSpec& quad, int threads) {
  if (family.empty()) throw input_error("check_decoupling: empty family");
  {
    int prev = 0;
    bool first = true;
    for (const auto& [k, set] : family) {
      (void)set;
      if (!first && k - prev < a_sep * delta.i)
        throw input_error("check_decoupling: keys closer than A log2(1/delta)");
      prev = k;
      first = false;
    }
  }

  const double p2s = e.two_s().to_double();
  std::vector<int> keys;
  std::vector<Field> fields;
  CellSet omega;
  bool have_omega = false;
  for (const auto& [k, set] : family) {
    keys.push_back(k);
    fields.push_back(extend(Density(set), grid, quad, threads));
    omega = have_omega ? set_union(omega, set) : set;
    have_omega = true;
  }
  const std::size_t m = keys.size();

  DecoupleReport rep;
  std::vector<const Field*> all;
  for (const Field& f : fields) all.push_back(&f);
  rep.lhs = std::pow(lp_norm(field_sum(all), p2s), p2s);
  rep.diag = 0.0;
  for (const Field& f : fields) rep.diag += std::pow(lp_norm(f, p2s), p2s);

  // Cross terms grouped by multiset; ordered quadruples are recovered through
  // the multinomial multiplicity.
  rep.offdiag = 0.0;
  rep.min_holder_slack = std::numeric_limits<double>::infinity();
  const double sh = e.s.to_double() / 2.0;
  std::vector<std::array<std::size_t, 4>> multisets;
  {
    std::array<std::size_t, 4> q{};
    for (q[0] = 0; q[0] < m; ++q[0])
      for (q[1] = q[0]; q[1] < m; ++q[1])
        for (q[2] = q[1]; q[2] < m; ++q[2])
          for (q[3] = q[2]; q[3] < m; ++q[3])
            if (q[0] != q[3]) multisets.push_back(q);
  }

  for (const auto& ms : multisets) {
    double term = std::pow(
        product_lp_norm({&fields[ms[0]], &fields[ms[1]], &fields[ms[2]], &fields[ms[3]]}, sh), sh);
    std::array<int, 4> cnt{};
    std::array<std::size_t, 4> vals{};
    int distinct = 0;
    for (std::size_t v : ms) {
      bool found = false;
      for (int d = 0; d < distinct; ++d) {
        if (vals[d] == v) {
          ++cnt[d];
          found = true;
          break;
        }
      }
      if (!found) {
        vals[distinct] = v;
        cnt[distinct] = 1;
        ++distinct;
      }
    }
    auto fact = [](int x) { return x <= 1 ? 1 : x == 2 ? 2 : x == 3 ? 6 : 24; };
    int mult = 24;
    for (int d = 0; d < distinct; ++d) mult /= fact(cnt[d]);
    rep.offdiag += mult * term;

    // Holder step: quadrilinear term against the (outer, inner) bilinear norms.
    double b14 = product_lp_norm({&fields[ms[0]], &fields[ms[3]]}, e.s.to_double());
    double b23 = product_lp_norm({&fields[ms[1]], &fields[ms[2]]}, e.s.to_double());
    double holder = std::pow(b14, sh) * std::pow(b23, sh);
    rep.min_holder_slack = std::min(rep.min_holder_slack, holder - term);

    char buf[64];
    std::snprintf(buf, sizeof buf, "K=(%d;%d;%d;%d)x%d", keys[ms[0]], keys[ms[1]], keys[ms[2]],
                  keys[ms[3]], mult);
    rep.terms.push_back(buf);
    rep.term_values.push_back(term);
  }

  double logd = static_cast<double>(delta.i);
  double omega_term =
      std::pow(omega.measure().to_double(), (e.two_s() / e.s_prime()).to_double());
  rep.bound = std::max(1.0, logd * logd) * rep.diag + delta.value() * omega_term;
  rep.expansion_slack = rep.diag + rep.offdiag - rep.lhs;
  rep.within_bound = rep.lhs <= rep.bound;
  return rep;
}

// --- necessity -------------------------------------------------------------------

namespace {

CellSet necessity_bump(int m, bool right, bool separated) {
  // Width-1/2 box hugging xi1 = +1 or -1, of height 2^-m; the separated
  // control keeps |xi2| >= 1/4 (heights then cap at 1/2).
  const int height_log2 = separated ? std::max(m, 1) : m;
  const int n = std::max(height_log2 + 1, 2);
  std::vector<Cell> cells;
  const std::int32_t w = std::int32_t(1) << (n - 1);
  const std::int32_t x0 = right ? (std::int32_t(1) << (n - 1)) : -(std::int32_t(1) << n);
  const std::int32_t rows = std::int32_t(1) << (n - height_log2);
  std::int32_t y0;
  if (!separated) {
    y0 = -(rows / 2);
  } else {
    const std::int32_t offset = std::int32_t(1) << (n - 2);
    y0 = right ? offset : -offset - rows;
  }
  for (std::int32_t x = 0; x < w; ++x)
    for (std::int32_t y = 0; y < rows; ++y) cells.emplace_back(x0 + x, y0 + y);
  return CellSet(n, Domain::Signed, std::move(cells));
}

}  // namespace

ScanResult necessity_experiment(int depth, const ExponentPair& e, const SpacetimeGrid& grid,
                                bool vertical_separation, const QuadratureSpec& quad,
                                int threads) {
  if (depth < 2) throw input_error("necessity: depth must be at least 2");
  ScanResult res;
  std::vector<double> xs, ys;
  const double p2s = e.two_s().to_double();
  for (int m = 0; m <= depth; ++m) {
    CellSet plus = necessity_bump(m, true, vertical_separation);
    CellSet minus = necessity_bump(m, false, vertical_separation);
    Field f1 = extend(Density(plus), grid, quad, threads);
    Field f2 = extend(Density(minus), grid, quad, threads);
    double lhs = product_lp_norm({&f1, &f2}, e.s.to_double());
    double l2 = std::sqrt(plus.measure().to_double() * minus.measure().to_double());
    ScanResult::Row row;
    row.params = {static_cast<double>(m)};
    row.norm = lhs;
    row.ratio_log2 = std::log2(lhs / l2);
    row.cs_slack = lp_norm(f1, p2s) * lp_norm(f2, p2s) - lhs;
    res.rows.push_back(row);
    xs.push_back(m);
    ys.push_back(row.ratio_log2);
  }
  fit_line(xs, ys, res.slope, res.intercept, res.residual);
  return res;
}

// --- sweep -----------------------------------------------------------------------

Generator generator_from_name(const std::string& name) {
  if (name == "random-cells") return Generator::RandomCells;
  if (name == "random-tile-unions") return Generator::RandomTileUnions;
  if (name == "cantor") return Generator::Cantor;
  if (name == "staircase") return Generator::Staircase;
  if (name == "single-tile") return Generator::SingleTile;
  throw input_error("unknown generator: " + name);
}

double reference_tile_ratio(int resolution, const ExponentPair& e, const SpacetimeGrid& grid,
                            const QuadratureSpec& quad, int threads) {
  double best = 0.0;
  for (int j = 0; j <= resolution; ++j) {
    for (int k = 0; k <= resolution; ++k) {
      CellSet tile = cellset_from_tile(Tile{DyadicInterval(j, 0), DyadicInterval(k, 0)},
                                       resolution, Domain::Unit);
      best = std::max(best, ratio(tile, e, grid, quad, threads));
    }
  }
  return best;
}

namespace {

CellSet generate_set(Generator gen, int n, Rng& rng) {
  switch (gen) {
    case Generator::RandomCells: {
      std::vector<Cell> cells;
      for (std::int32_t p = 0; p < (1 << n); ++p)
        for (std::int32_t q = 0; q < (1 << n); ++q)
          if (rng.coin(0.5)) cells.emplace_back(p, q);
      if (cells.empty()) cells.emplace_back(0, 0);
      return CellSet(n, Domain::Unit, std::move(cells));
    }
    case Generator::RandomTileUnions: {
      CellSet acc(n, Domain::Unit, {});
      int placed = 0;
      for (int attempt = 0; attempt < 32 && placed < 6; ++attempt) {
        int j = 1 + static_cast<int>(rng.below(n));
        int k = 1 + static_cast<int>(rng.below(n));
        std::int64_t hm = static_cast<std::int64_t>(rng.below(std::uint64_t(1) << j));
        std::int64_t vm = static_cast<std::int64_t>(rng.below(std::uint64_t(1) << k));
        CellSet tile =
            cellset_from_tile(Tile{DyadicInterval(j, hm), DyadicInterval(k, vm)}, n, Domain::Unit);
        if (!set_intersection(acc, tile).empty()) continue;
        acc = set_union(acc, tile);
        ++placed;
      }
      if (acc.empty())
        acc = cellset_from_tile(Tile{DyadicInterval(1, 0), DyadicInterval(1, 0)}, n, Domain::Unit);
      return acc;
    }
    case Generator::Cantor: {
      // Three generations of remove-the-middle-half per axis: leading base-4
      // digit pairs restricted to 00 / 11.
      std::vector<std::int32_t> keep1d;
      for (std::int32_t p = 0; p < (1 << n); ++p) {
        bool ok = true;
        for (int g = 0; g + 1 < std::min(n, 6); g += 2) {
          int pair = (p >> (n - 2 - g)) & 3;
          if (pair != 0 && pair != 3) ok = false;
        }
        if (ok) keep1d.push_back(p);
      }
      std::vector<Cell> cells;
      for (std::int32_t p : keep1d)
        for (std::int32_t q : keep1d) cells.emplace_back(p, q);
      return CellSet(n, Domain::Unit, std::move(cells));
    }
    case Generator::Staircase: {
      int m = std::min(4, n);
      CellSet acc(n, Domain::Unit, {});
      for (std::int64_t i = 0; i < (std::int64_t(1) << m); ++i) {
        acc = set_union(acc, cellset_from_tile(Tile{DyadicInterval(m, i), DyadicInterval(m, i)}, n,
                                               Domain::Unit));
      }
      return acc;
    }
    case Generator::SingleTile: {
      int j = static_cast<int>(rng.below(n + 1));
      int k = static_cast<int>(rng.below(n + 1));
      return cellset_from_tile(Tile{DyadicInterval(j, 0), DyadicInterval(k, 0)}, n, Domain::Unit);
    }
  }
  throw input_error("unknown generator");
}

}  // namespace

SuiteReport main_ratio_sweep(Generator gen, int count, std::uint64_t seed, int resolution,
                             const ExponentPair& e, const SpacetimeGrid& grid,
                             const StructureConfig& cfg, const QuadratureSpec& quad, int threads) {
  if (count < 1) throw input_error("sweep: count must be positive");
  SuiteReport rep;
  rep.reference_ratio = reference_tile_ratio(resolution, e, grid, quad, threads);
  Rng rng(seed);
  const double cd = cfg.c.to_double();
  for (int i = 0; i < count; ++i) {
    CellSet omega = generate_set(gen, resolution, rng);
    SuiteReport::Case cs;
    char buf[64];
    std::snprintf(buf, sizeof buf, "case%03d/cells=%zu", i, omega.size());
    cs.descriptor = buf;
    cs.ratio = ratio(omega, e, grid, quad, threads);
    FiberDecomposition fd = fiber_slice(omega);
    cs.parts = static_cast<int>(fd.parts.size());
    for (const auto& [k, part] : fd.parts) {
      (void)k;
      TileCover cover = tile_cover(part, cfg);
      for (const auto& [delta, entry] : cover.entries) {
        cs.tiles += static_cast<int>(entry.tiles.size());
        double bound = cfg.a_cover * std::pow(std::ldexp(1.0, -delta), -cd);
        cs.worst_count_ratio =
            std::max(cs.worst_count_ratio, static_cast<double>(entry.tiles.size()) / bound);
      }
    }
    rep.max_ratio = std::max(rep.max_ratio, cs.ratio);
    rep.cases.push_back(std::move(cs));
  }
  return rep;
}

SuiteReport verify_constant_fiber(const FiberDecomposition& fd, const ExponentPair& e,
                                  const SpacetimeGrid& grid, const ProbeSpec& probes,
                                  const StructureConfig& cfg, const QuadratureSpec& quad,
                                  int threads) {
  SuiteReport rep;
  const double p2s = e.two_s().to_double();
  const double inv_sp = (Rational(1) / e.s_prime()).to_double();

  // Reference: the best canonical tile among the (J,K) shapes present.
  for (const auto& [k, part] : fd.parts) {
    if (part.empty()) continue;
    int j = choose_j(part);
    int kk = std::min(k, part.resolution());
    CellSet tile = cellset_from_tile(Tile{DyadicInterval(j, 0), DyadicInterval(kk, 0)},
                                     part.resolution(), Domain::Unit);
    rep.reference_ratio = std::max(rep.reference_ratio, ratio(tile, e, grid, quad, threads));
  }

  for (const auto& [k, part] : fd.parts) {
    if (part.empty()) continue;
    const double denom = std::pow(part.measure().to_double(), inv_sp);
    std::vector<std::pair<std::string, CellSet>> family;
    family.emplace_back("part", part);
    TileCover cover = tile_cover(part, cfg);
    for (const auto& [delta, entry] : cover.entries) {
      family.emplace_back("delta=2^-" + std::to_string(delta), entry.residual);
      int ti = 0;
      for (const Tile& t : entry.tiles) {
        family.emplace_back(
            "tile" + std::to_string(ti++),
            set_intersection(cellset_from_tile(t, part.resolution(), part.domain()), part));
        if (ti >= 8) break;
      }
    }
    Rng rng(probes.seed + static_cast<std::uint64_t>(k));
    for (int i = 0; i < probes.count; ++i) {
      std::vector<Cell> keep;
      for (const Cell& c : part.cells())
        if (rng.coin(0.5)) keep.push_back(c);
      family.emplace_back("random" + std::to_string(i),
                          CellSet(part.resolution(), part.domain(), std::move(keep)));
    }
    for (const auto& [name, probe] : family) {
      if (probe.empty()) continue;
      double nrm = lp_norm(extend(Density(probe), grid, quad, threads), p2s);
      SuiteReport::Case cs;
      cs.descriptor = "K=" + std::to_string(k) + "/" + name;
      cs.ratio = nrm / denom;
      rep.max_ratio = std::max(rep.max_ratio, cs.ratio);
      rep.cases.push_back(std::move(cs));
    }
  }
  return rep;
}

}  // namespace hypar
