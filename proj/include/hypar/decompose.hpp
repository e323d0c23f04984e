#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hypar/dyadic.hpp"
#include "hypar/extension.hpp"

namespace hypar {

// Dyadic parameter 2^-i (the eta / rho / delta ladder).
struct DyadicParam {
  int i = 0;
  DyadicParam() = default;
  explicit DyadicParam(int i_) : i(i_) {
    if (i < 0) throw input_error("dyadic parameter: exponent must be nonnegative");
  }
  double value() const { return std::ldexp(1.0, -i); }
};

// Knobs the estimates leave symbolic: the structure exponent C, the smallest
// parameter on the ladder, and the constant in the cover-count bound.
struct StructureConfig {
  Rational c = Rational(4);
  int eps_min_log2 = 10;
  double a_cover = 16.0;

  void validate() const {
    if (c < Rational(1)) throw input_error("structure: C must be >= 1");
    if (c.den > 7) throw input_error("structure: C denominator at most 7");
    if (eps_min_log2 < 0 || eps_min_log2 > 30) throw input_error("structure: bad eps_min");
    if (a_cover < 1.0) throw input_error("structure: A_cover must be >= 1");
  }
};

// --- fiber slicing --------------------------------------------------------

// Bin of a positive measure: the unique L with m in (2^-(L+1), 2^-L].
int dyadic_bin(const Rational& m);

// Partition of a set by the fiber-length bin of each column.
struct FiberDecomposition {
  CellSet source;
  std::map<int, CellSet> parts;  // K -> cells whose column fiber is ~ 2^-K
};

FiberDecomposition fiber_slice(const CellSet& omega);

// J with |pi1(omega)| in (2^-(J+1), 2^-J]; error on the empty set.
int choose_j(const CellSet& omega);

// --- 1-D stratification machinery -----------------------------------------

// Largest dyadic ancestor of the cell whose density against s is at least
// eta^C.  The cell interval itself qualifies (density 1), so for eta <= 1 the
// result always exists; the optional stays empty only for cells outside s.
std::optional<DyadicInterval> maximal_interval(const CellSet1D& s, std::int32_t cell,
                                               const DyadicParam& eta, const Rational& c);

// Level sets of the maximal-interval length: level i holds the cells whose
// smallest qualifying parameter is 2^-i (top level collects everything at or
// above the cap).  Cells never qualifying by the end of the ladder fall into
// the explicit residual.
struct AxisStrata {
  int scale = 0;                      // the reference scale (J or K)
  int cap_log2 = 0;                   // coarsest level of this ladder
  std::map<int, CellSet1D> strata;    // level i -> S_{2^-i}
  CellSet1D residual;
};

AxisStrata stratify_axis(const CellSet1D& s, int scale, const StructureConfig& cfg,
                         int cap_log2 = 0);

// Scale-`scale` dyadic interval cover of an axis stratum, with the count
// guard from the stratification structure.
std::vector<DyadicInterval> interval_cover(const CellSet1D& s_eta, int scale,
                                           const DyadicParam& eta, const StructureConfig& cfg);

// --- the three stages ------------------------------------------------------

struct Stratum {
  int eta_log2 = 0;
  int rho_log2 = -1;    // -1 until stage 2 assigns it
  int delta_log2 = -1;  // -1 until stage 3 assigns it
  CellSet body;
};

struct StageResult {
  std::vector<Stratum> strata;
  CellSet residual;
};

// Columns of the part grouped by the stratification of pi1.
StageResult stage1(const CellSet& part, int j, const StructureConfig& cfg);
// Rows of a stage-1 stratum grouped by row length against rho^C 2^-J.
StageResult stage2(const Stratum& s1, int j, const StructureConfig& cfg);
// The stage-1 construction applied to pi2 of a stage-2 stratum at scale K.
StageResult stage3(const Stratum& s2, int k, const StructureConfig& cfg);

// --- the composed cover ----------------------------------------------------

struct TileCoverEntry {
  std::vector<Tile> tiles;
  CellSet residual;  // Omega_delta
};

struct TileCover {
  int j = 0, k = 0;
  std::map<int, TileCoverEntry> entries;  // delta_log2 -> entry
  CellSet unstratified;                   // cells no ladder level accepted
};

// Composition of the three stages on a constant-fiber part.  K is derived
// from the part's fibers (they must share one bin), J from its projection.
TileCover tile_cover(const CellSet& part, const StructureConfig& cfg);

// Structural checks used by tests and the CLI: exact partition of the source
// and residual-inside-tiles containment.
bool tile_cover_is_partition(const TileCover& cover, const CellSet& part);
bool tile_cover_contained(const TileCover& cover);

// --- sharpness classes ------------------------------------------------------

struct ProbeSpec {
  int count = 4;
  std::uint64_t seed = 1;
};

// Smallest dyadic upper bound (clamped to <= 1) on the normalized extension
// ratio over a probe family of subsets of each part: the delta-bodies of the
// cover, the cover tiles cut to the part, and seeded random subsets.
std::map<int, DyadicParam> epsilon_class(const FiberDecomposition& fd, const ExponentPair& e,
                                         const ProbeSpec& probes, const SpacetimeGrid& grid,
                                         const StructureConfig& cfg = {},
                                         const QuadratureSpec& quad = {}, int threads = 0);

}  // namespace hypar
