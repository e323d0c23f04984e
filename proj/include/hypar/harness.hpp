#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hypar/decompose.hpp"
#include "hypar/dyadic.hpp"
#include "hypar/extension.hpp"

namespace hypar {

// --- slab decomposition -----------------------------------------------------

// Dyadic bands |xi_axis| ~ 2^-k of a set whose bounding box is centered on
// the other axis.  A cell joins the band of its outermost point; cells inside
// |xi_axis| <= 2^-(kmax+1) form the core.
struct SlabDecomposition {
  std::vector<std::pair<int, CellSet>> bands;  // (k, band), k = 0..kmax
  CellSet core;
};

SlabDecomposition slab_decompose(const CellSet& tau, int axis, int kmax);

// --- exponent scans ----------------------------------------------------------

struct ScanResult {
  struct Row {
    std::vector<double> params;
    double norm = 0.0;        // measured product norm
    double ratio_log2 = 0.0;  // log2 of the normalized quantity
    double cs_slack = 0.0;    // Cauchy-Schwarz bound minus norm (>= 0)
  };
  std::vector<Row> rows;
  double slope = 0.0, intercept = 0.0, residual = 0.0;
};

// Least squares of y against x in log2 coordinates; needs >= 3 rows.
void fit_line(const std::vector<double>& x, const std::vector<double>& y, double& slope,
              double& intercept, double& residual);

// Normalized bilinear norms of separated tile pairs across scales.  Each row
// (j,k), j,k >= 1, places the canonical separated pair of D_{j,k} tiles and
// evaluates on the grid matched to that scale, so the fitted slope measures
// the scaling exponent itself; `grid` is the (1,1) base grid.
ScanResult scan_bilinear_exponent(const ExponentPair& e, const std::vector<std::pair<int, int>>& range,
                                  const SpacetimeGrid& grid, const QuadratureSpec& quad = {},
                                  int threads = 0);

// --- bilinear decay across fiber bins ----------------------------------------

// Synthetic hard-case pair: a tall narrow bar crossing a short wide bar, both
// centered (the wide bar loses the columns of the tall one, keeping the sets
// disjoint).  gap = 0 degenerates to two stacked halves of the square.
struct DecayPair {
  int k1 = 0, k2 = 0, j1 = 0, j2 = 0;
  CellSet set1, set2;
};

DecayPair make_hard_case_pair(int gap);

struct DecayFit {
  struct Row {
    int k1 = 0, k2 = 0, j1 = 0, j2 = 0;
    double lhs = 0.0;        // || E chi_1 E chi_2 ||_s
    double rhs0 = 0.0;       // max(|set1|,|set2|)^(2/s')
    double cs_slack = 0.0;
  };
  std::vector<Row> pairs;
  double c0_hat = 0.0;
  int monotone_steps = 0;  // consecutive decreasing steps of lhs/rhs0 from the start
};

DecayFit fit_decay_c0(const std::vector<DecayPair>& pairs, const ExponentPair& e,
                      const SpacetimeGrid& grid, const QuadratureSpec& quad = {}, int threads = 0);

// --- decoupling check ---------------------------------------------------------

struct DecoupleReport {
  double lhs = 0.0;                  // || sum_K E chi ||_2s ^ 2s
  double diag = 0.0;                 // sum_K || E chi ||_2s ^ 2s
  double offdiag = 0.0;              // sum of cross quadrilinear terms
  double bound = 0.0;                // (log2 1/delta)^2 * diag + delta * |Omega|^(2s/s')
  double expansion_slack = 0.0;      // diag + offdiag - lhs  (exact, >= 0)
  double min_holder_slack = 0.0;     // min over quadruples of pairwise-bound slack
  bool within_bound = false;
  std::vector<std::string> terms;    // per-quadruple descriptors for the CSV
  std::vector<double> term_values;
};

DecoupleReport check_decoupling(const std::map<int, CellSet>& family, const DyadicParam& delta,
                                const ExponentPair& e, const SpacetimeGrid& grid, int a_sep = 4,
                                const QuadratureSpec& quad = {}, int threads = 0);

// --- two-bump necessity experiment --------------------------------------------

// Horizontally separated bumps near (+-1, 0) of height 2^-m; vertical
// separation is absent in the main family and fixed (1/2) in the control.
ScanResult necessity_experiment(int depth, const ExponentPair& e, const SpacetimeGrid& grid,
                                bool vertical_separation = false, const QuadratureSpec& quad = {},
                                int threads = 0);

// --- main ratio sweep -----------------------------------------------------------

enum class Generator { RandomCells, RandomTileUnions, Cantor, Staircase, SingleTile };

Generator generator_from_name(const std::string& name);

struct SuiteReport {
  struct Case {
    std::string descriptor;
    double ratio = 0.0;
    int parts = 0;         // fiber bins
    int tiles = 0;         // total cover tiles over all bins and deltas
    double worst_count_ratio = 0.0;  // max over deltas of count / (A_cover delta^-C)
  };
  std::vector<Case> cases;
  double max_ratio = 0.0;
  double reference_ratio = 0.0;
};

// Ratio of the best single tile over all D_{j,k} shapes at this resolution,
// anchored at the origin; the yardstick every sweep reports against.
double reference_tile_ratio(int resolution, const ExponentPair& e, const SpacetimeGrid& grid,
                            const QuadratureSpec& quad = {}, int threads = 0);

SuiteReport main_ratio_sweep(Generator gen, int count, std::uint64_t seed, int resolution,
                             const ExponentPair& e, const SpacetimeGrid& grid,
                             const StructureConfig& cfg = {}, const QuadratureSpec& quad = {},
                             int threads = 0);

// Ratios of probe subsets of every fiber part against |part|^(1/s').
SuiteReport verify_constant_fiber(const FiberDecomposition& fd, const ExponentPair& e,
                                  const SpacetimeGrid& grid, const ProbeSpec& probes = {},
                                  const StructureConfig& cfg = {}, const QuadratureSpec& quad = {},
                                  int threads = 0);

}  // namespace hypar
