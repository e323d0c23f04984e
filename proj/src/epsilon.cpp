#include "hypar/decompose.hpp"
#include "hypar/rng.hpp"

#include <cmath>

namespace hypar {

namespace {

// Smallest power of two >= v, clamped into [2^-imax, 1].
DyadicParam dyadic_round_up(double v, int imax) {
  if (!(v > 0)) return DyadicParam(imax);
  int i = 0;
  while (i < imax && std::ldexp(1.0, -(i + 1)) >= v) ++i;
  if (std::ldexp(1.0, -i) < v) i = 0;  // ratios above 1 clamp to the top
  return DyadicParam(i);
}

}  // namespace

std::map<int, DyadicParam> epsilon_class(const FiberDecomposition& fd, const ExponentPair& e,
                                         const ProbeSpec& probes, const SpacetimeGrid& grid,
                                         const StructureConfig& cfg, const QuadratureSpec& quad,
                                         int threads) {
  std::map<int, DyadicParam> out;
  const double inv_sp = (Rational(1) / e.s_prime()).to_double();
  const double p = e.two_s().to_double();

  for (const auto& [k, part] : fd.parts) {
    if (part.empty()) continue;
    std::vector<CellSet> family;
    family.push_back(part);

    TileCover cover = tile_cover(part, cfg);
    for (const auto& [delta, entry] : cover.entries) {
      family.push_back(entry.residual);
      for (const Tile& t : entry.tiles)
        family.push_back(set_intersection(cellset_from_tile(t, part.resolution(), part.domain()),
                                          part));
    }
    Rng rng(probes.seed + static_cast<std::uint64_t>(k));
    for (int i = 0; i < probes.count; ++i) {
      std::vector<Cell> keep;
      for (const Cell& c : part.cells())
        if (rng.coin(0.5)) keep.push_back(c);
      family.emplace_back(part.resolution(), part.domain(), std::move(keep));
    }

    const double denom = std::pow(part.measure().to_double(), inv_sp);
    double best = 0.0;
    for (const CellSet& probe : family) {
      if (probe.empty()) continue;
      double nrm = lp_norm(extend(Density(probe), grid, quad, threads), p);
      best = std::max(best, nrm / denom);
    }
    out.emplace(k, dyadic_round_up(best, cfg.eps_min_log2));
  }
  return out;
}

}  // namespace hypar
