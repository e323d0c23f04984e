#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "hypar/dyadic.hpp"
#include "hypar/extension.hpp"

namespace hypar {

// Axis-aligned rectangle with power-of-two side lengths at a cell-aligned
// position.  Dyadic-aligned tiles are the w==x0-aligned special case; the
// one-cell translation move needs the looser anchoring.
struct Rect {
  int w_log2 = 0, h_log2 = 0;       // sides 2^-w_log2 x 2^-h_log2
  std::int32_t x0 = 0, y0 = 0;      // lower-left cell at the ambient resolution

  friend bool operator==(const Rect& a, const Rect& b) {
    return a.w_log2 == b.w_log2 && a.h_log2 == b.h_log2 && a.x0 == b.x0 && a.y0 == b.y0;
  }
  friend bool operator<(const Rect& a, const Rect& b) {
    return std::tie(a.w_log2, a.h_log2, a.x0, a.y0) < std::tie(b.w_log2, b.h_log2, b.x0, b.y0);
  }
};

// Disjoint rect union of exactly the budgeted measure.
class Configuration {
 public:
  Configuration(int resolution, Domain dom, std::vector<Rect> rects, Rational budget);

  int resolution() const { return n_; }
  Domain domain() const { return dom_; }
  const std::vector<Rect>& rects() const { return rects_; }
  const Rational& budget() const { return budget_; }
  CellSet cells() const;

  static Configuration single_tile(int resolution, Domain dom, int j, int k);

 private:
  int n_ = 0;
  Domain dom_ = Domain::Unit;
  std::vector<Rect> rects_;
  Rational budget_;
};

// Measure-preserving neighbors: split-and-relocate, merge, one-cell
// translation, aspect swap; overlapping or domain-exiting results are
// dropped.  Empty lists are legitimate (nowhere to move).
std::vector<Configuration> local_moves(const Configuration& c);

struct SearchParams {
  std::uint64_t seed = 1;
  int iterations = 200;
  double temp_initial = 0.05;
  double temp_decay = 0.97;  // per-iteration factor, in (0,1)
  // Relative weights of the four move kinds, in the order above.
  std::array<double, 4> move_weights{1.0, 1.0, 2.0, 1.0};

  void validate() const {
    if (iterations < 1) throw input_error("search: iterations must be >= 1");
    if (!(temp_decay > 0.0 && temp_decay < 1.0))
      throw input_error("search: decay factor must lie in (0,1)");
  }
};

struct SearchTrace {
  struct Step {
    int iteration = 0;
    std::string move;
    double accepted_ratio = 0.0;
    double best_ratio = 0.0;
  };
  std::vector<Step> steps;
};

struct SearchResult {
  Configuration best;
  double best_ratio = 0.0;
  SearchTrace trace;
};

// Simulated annealing on the restricted-type ratio, deterministic for a
// given (seed, params, grid).
SearchResult search_extremizer(const ExponentPair& e, const Configuration& start,
                               const SearchParams& params, const SpacetimeGrid& grid,
                               const QuadratureSpec& quad = {}, int threads = 0);

}  // namespace hypar
