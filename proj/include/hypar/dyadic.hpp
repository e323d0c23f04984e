#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hypar/errors.hpp"
#include "hypar/rational.hpp"

namespace hypar {

// Finest representable resolution: intervals of length 2^-16.
inline constexpr int kScaleMax = 16;

inline void check_scale(int n) {
  if (n < 0 || n > kScaleMax) throw input_error("scale out of range");
}

// Active coordinate domain for sets and intervals.
//   Unit:   [0,1] per axis, cell indices in [0, 2^n)
//   Signed: [-1,1] per axis, cell indices in [-2^n, 2^n)
enum class Domain { Unit, Signed };

inline std::int64_t lo_index(Domain d, int n) { return d == Domain::Unit ? 0 : -(std::int64_t(1) << n); }
inline std::int64_t hi_index(Domain, int n) { return std::int64_t(1) << n; }

// [m*2^-n, (m+1)*2^-n]
struct DyadicInterval {
  int n = 0;
  std::int64_t m = 0;

  DyadicInterval() = default;
  DyadicInterval(int n_, std::int64_t m_) : n(n_), m(m_) { check_scale(n); }

  double lo() const { return static_cast<double>(m) / static_cast<double>(std::int64_t(1) << n); }
  double hi() const { return static_cast<double>(m + 1) / static_cast<double>(std::int64_t(1) << n); }
  Rational length() const { return Rational(1, std::int64_t(1) << n); }
  DyadicInterval parent() const {
    require(n > 0, "dyadic interval: no parent above scale 0");
    return DyadicInterval(n - 1, m >> 1);
  }
  bool in_domain(Domain d) const { return m >= lo_index(d, n) && m < hi_index(d, n); }

  friend bool operator==(const DyadicInterval& a, const DyadicInterval& b) {
    return a.n == b.n && a.m == b.m;
  }
  friend bool operator<(const DyadicInterval& a, const DyadicInterval& b) {
    return a.n != b.n ? a.n < b.n : a.m < b.m;
  }
};

// Whitney relation at a fixed scale: distinct, a positive gap apart, and the
// parents are equal or adjacent.  This is the scale at which a pair of points
// first separates in the dyadic tree.
inline bool whitney_related(const DyadicInterval& a, const DyadicInterval& b) {
  if (a.n != b.n) throw input_error("whitney_related: scale mismatch");
  std::int64_t gap = a.m > b.m ? a.m - b.m : b.m - a.m;
  if (gap < 2) return false;
  std::int64_t pa = a.m >> 1, pb = b.m >> 1;
  std::int64_t pgap = pa > pb ? pa - pb : pb - pa;
  return pgap <= 1;
}

// Product of two dyadic intervals; h has scale j, v has scale k.
struct Tile {
  DyadicInterval h;
  DyadicInterval v;

  friend bool operator==(const Tile& a, const Tile& b) { return a.h == b.h && a.v == b.v; }
  friend bool operator<(const Tile& a, const Tile& b) {
    if (!(a.h == b.h)) return a.h < b.h;
    return a.v < b.v;
  }
};

using Cell = std::pair<std::int32_t, std::int32_t>;  // (column p, row q)

// A measurable set discretized as a union of square cells of side 2^-n.
// Cells are kept sorted and duplicate-free; measure is count * 4^-n, exact.
class CellSet {
 public:
  CellSet() = default;
  CellSet(int n, Domain dom, std::vector<Cell> cells) : n_(n), dom_(dom), cells_(std::move(cells)) {
    check_scale(n_);
    std::sort(cells_.begin(), cells_.end());
    for (std::size_t i = 0; i + 1 < cells_.size(); ++i)
      if (cells_[i] == cells_[i + 1]) throw input_error("cell set: duplicate cell");
    for (const Cell& c : cells_) {
      if (c.first < lo_index(dom_, n_) || c.first >= hi_index(dom_, n_) ||
          c.second < lo_index(dom_, n_) || c.second >= hi_index(dom_, n_))
        throw input_error("cell set: cell outside domain");
    }
  }

  int resolution() const { return n_; }
  Domain domain() const { return dom_; }
  const std::vector<Cell>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }
  std::size_t size() const { return cells_.size(); }

  Rational measure() const {
    return Rational(static_cast<std::int64_t>(cells_.size()), std::int64_t(1) << (2 * n_));
  }

  bool contains(Cell c) const { return std::binary_search(cells_.begin(), cells_.end(), c); }

  // Same set, represented with cells split d times per axis.
  CellSet refine(int d) const {
    check_scale(n_ + d);
    std::vector<Cell> out;
    out.reserve(cells_.size() << (2 * d));
    for (const Cell& c : cells_)
      for (std::int32_t u = 0; u < (1 << d); ++u)
        for (std::int32_t v = 0; v < (1 << d); ++v)
          out.emplace_back((c.first << d) + u, (c.second << d) + v);
    std::sort(out.begin(), out.end());
    return CellSet(n_ + d, dom_, std::move(out));
  }

  friend CellSet set_union(const CellSet& a, const CellSet& b) {
    require(a.n_ == b.n_ && a.dom_ == b.dom_, "set_union: mismatched representations");
    std::vector<Cell> out;
    std::set_union(a.cells_.begin(), a.cells_.end(), b.cells_.begin(), b.cells_.end(),
                   std::back_inserter(out));
    return CellSet(a.n_, a.dom_, std::move(out));
  }
  friend CellSet set_intersection(const CellSet& a, const CellSet& b) {
    require(a.n_ == b.n_ && a.dom_ == b.dom_, "set_intersection: mismatched representations");
    std::vector<Cell> out;
    std::set_intersection(a.cells_.begin(), a.cells_.end(), b.cells_.begin(), b.cells_.end(),
                          std::back_inserter(out));
    return CellSet(a.n_, a.dom_, std::move(out));
  }
  friend CellSet set_difference(const CellSet& a, const CellSet& b) {
    require(a.n_ == b.n_ && a.dom_ == b.dom_, "set_difference: mismatched representations");
    std::vector<Cell> out;
    std::set_difference(a.cells_.begin(), a.cells_.end(), b.cells_.begin(), b.cells_.end(),
                        std::back_inserter(out));
    return CellSet(a.n_, a.dom_, std::move(out));
  }

  friend bool operator==(const CellSet& a, const CellSet& b) {
    return a.n_ == b.n_ && a.dom_ == b.dom_ && a.cells_ == b.cells_;
  }

 private:
  int n_ = 0;
  Domain dom_ = Domain::Unit;
  std::vector<Cell> cells_;
};

// One-dimensional analogue: a union of cells of length 2^-n.
class CellSet1D {
 public:
  CellSet1D() = default;
  CellSet1D(int n, Domain dom, std::vector<std::int32_t> cells)
      : n_(n), dom_(dom), cells_(std::move(cells)) {
    check_scale(n_);
    std::sort(cells_.begin(), cells_.end());
    for (std::size_t i = 0; i + 1 < cells_.size(); ++i)
      if (cells_[i] == cells_[i + 1]) throw input_error("cell set 1d: duplicate cell");
    for (std::int32_t c : cells_)
      if (c < lo_index(dom_, n_) || c >= hi_index(dom_, n_))
        throw input_error("cell set 1d: cell outside domain");
  }

  int resolution() const { return n_; }
  Domain domain() const { return dom_; }
  const std::vector<std::int32_t>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }
  std::size_t size() const { return cells_.size(); }
  bool contains(std::int32_t c) const { return std::binary_search(cells_.begin(), cells_.end(), c); }

  Rational measure() const {
    return Rational(static_cast<std::int64_t>(cells_.size()), std::int64_t(1) << n_);
  }

  // Number of cells inside the dyadic interval [m*2^-l, (m+1)*2^-l).
  std::int64_t count_in(int l, std::int64_t m) const {
    require(l <= n_, "count_in: interval finer than resolution");
    std::int64_t lo = m << (n_ - l), hi = (m + 1) << (n_ - l);
    auto b = std::lower_bound(cells_.begin(), cells_.end(), static_cast<std::int32_t>(lo));
    auto e = std::lower_bound(cells_.begin(), cells_.end(), static_cast<std::int32_t>(hi));
    return e - b;
  }

  friend bool operator==(const CellSet1D& a, const CellSet1D& b) {
    return a.n_ == b.n_ && a.dom_ == b.dom_ && a.cells_ == b.cells_;
  }

 private:
  int n_ = 0;
  Domain dom_ = Domain::Unit;
  std::vector<std::int32_t> cells_;
};

// Exponent data (s, r); the dual s' = s/(s-1) is derived.  The admissible
// window is 3/2 < s < 2 and 1 <= r <= s' (the critical line r = s' included).
struct ExponentPair {
  Rational s;
  Rational r;

  ExponentPair(Rational s_, Rational r_) : s(s_), r(r_) {
    if (!(Rational(3, 2) < s && s < Rational(2))) throw input_error("exponents: need 3/2 < s < 2");
    if (!(Rational(1) <= r && r <= s_prime())) throw input_error("exponents: need 1 <= r <= s'");
  }

  Rational s_prime() const { return dual_exponent(s); }
  Rational two_s() const { return s * Rational(2); }
};

// alpha = 2 - 2/s - 2/r; vanishes exactly on the critical line r = s'.
inline Rational bilinear_scaling_exponent(const ExponentPair& e) {
  return Rational(2) - Rational(2) / e.s - Rational(2) / e.r;
}

// --- projections, fibers, tile occupancy ---------------------------------

CellSet1D project1(const CellSet& a);
CellSet1D project2(const CellSet& a);

// Length of the vertical fiber over column p (0 if the column is empty).
Rational fiber_length(const CellSet& a, std::int32_t p);

// Exact identity sum_p fiber_length(a, p) * 2^-n == measure(a) by counting.
CellSet cellset_from_tile(const Tile& t, int n, Domain dom);

// Tile of D_{j,k} containing a cell at resolution n.
Tile tile_containing(Cell c, int n, int j, int k);

// All Whitney-related tile pairs of D_{j,k} meeting the set, each pair listed
// once with the lexicographically smaller tile first.
std::vector<std::pair<Tile, Tile>> whitney_pairs(const CellSet& a, int j, int k);

}  // namespace hypar
