#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "hypar/dyadic.hpp"
#include "hypar/field.hpp"
#include "hypar/grid.hpp"

namespace hypar {

// Frequency-side density: a cell set, optionally with one complex weight per
// cell.  No weights means the characteristic function of the support.
struct Density {
  CellSet support;
  std::optional<std::vector<std::complex<double>>> weights;

  Density() = default;
  explicit Density(CellSet s) : support(std::move(s)) {}
  Density(CellSet s, std::vector<std::complex<double>> w)
      : support(std::move(s)), weights(std::move(w)) {
    if (weights->size() != support.size())
      throw input_error("density: weight count must match cell count");
  }
};

enum class EvalPath { Direct, SliceTransform };

// Quadrature control.  `oversample` splits every cell into o x o midpoint
// subcells.  The anisotropic factory exists for matched-pair comparisons,
// where one side must be integrated on the image of the other side's rule.
struct QuadratureSpec {
  int oversample1 = 1;
  int oversample2 = 1;
  EvalPath path = EvalPath::SliceTransform;

  QuadratureSpec() = default;
  explicit QuadratureSpec(int oversample, EvalPath p = EvalPath::SliceTransform)
      : oversample1(oversample), oversample2(oversample), path(p) {
    validate();
  }
  static QuadratureSpec anisotropic(int o1, int o2, EvalPath p = EvalPath::SliceTransform) {
    QuadratureSpec q;
    q.oversample1 = o1;
    q.oversample2 = o2;
    q.path = p;
    q.validate();
    return q;
  }
  void validate() const {
    for (int o : {oversample1, oversample2})
      if (o != 1 && o != 2 && o != 4 && o != 8)
        throw input_error("quadrature: oversample must be 1, 2, 4 or 8");
  }
};

// E f(t,x) = sum over (sub)cells of w * area * exp(i(t c1 c2 + x1 c1 + x2 c2))
// with c the subcell midpoint.  The direct path evaluates that sum verbatim
// per sample and serves as the correctness reference.  The slice-transform
// path modulates the cell weights by exp(i t c1 c2) per time slice and
// applies the two separable spatial phase matrices; it is the fast path and
// agrees with the direct path to rounding.
//
// Numeric guard: the spatial lattice must resolve the finest cell
// oscillation, i.e. h_x < pi * 2^n on both axes; otherwise numeric_error.
Field extend(const Density& f, const SpacetimeGrid& grid, const QuadratureSpec& quad = {},
             int threads = 0);

// (sum |F|^p vol)^(1/p) with a deterministic pairwise reduction.  Exponents
// below 1 (the s/2 quasi-norm) are accepted.
double lp_norm(const Field& f, double p);

// || F_1 * ... * F_k ||_p for fields sharing one grid.
double product_lp_norm(const std::vector<const Field*>& fields, double p);

// Samplewise sum of fields on one grid.
Field field_sum(const std::vector<const Field*>& fields);

// || Ef * Eg ||_s on a shared grid.
double bilinear_norm(const Density& f, const Density& g, const SpacetimeGrid& grid,
                     const ExponentPair& e, const QuadratureSpec& quad = {}, int threads = 0);

// || E chi_set ||_2s / |set|^(1/s').
double ratio(const CellSet& set, const ExponentPair& e, const SpacetimeGrid& grid,
             const QuadratureSpec& quad = {}, int threads = 0);

// Support map of (xi1, xi2) -> (2^-a xi1, 2^-b xi2), represented at
// resolution n + max(a,b).  Weights ride along unchanged.
Density parabolic_rescale(const Density& f, int a, int b);

// Evaluation of the original set under the quadrature rule that is the
// preimage of the rescaled set's plain rule; on matched_grid(g, a, b) the
// rescaled field equals 2^-(a+b) times this one, sample for sample.
Field extend_matched_source(const Density& f, const SpacetimeGrid& grid, int a, int b,
                            int oversample = 1, int threads = 0);

// Box-truncation study on a nested grid sequence.
struct TailReport {
  struct Row {
    SpacetimeGrid grid;
    double norm = 0.0;
  };
  std::vector<Row> rows;
  double decay_ratio = 0.0;    // fitted geometric ratio of successive tail increments
  double extrapolated = 0.0;   // limit estimate (equals last norm when not converged)
  double uncertainty = 0.0;
  bool converged = false;
};

TailReport tail_report(const CellSet& set, const ExponentPair& e,
                       const std::vector<SpacetimeGrid>& grids, const QuadratureSpec& quad = {},
                       int threads = 0);

}  // namespace hypar
