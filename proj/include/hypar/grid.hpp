#pragma once

#include <cstdint>
#include <vector>

#include "hypar/errors.hpp"

namespace hypar {

// Truncated spacetime sampling box.  Half-widths may differ between the two
// spatial axes: the matched-grid transform of a rescaled set is anisotropic.
// The lattice on each axis is c + i*h with c = -floor(M/2)*h, so zero is
// always a sample point.
struct SpacetimeGrid {
  double r_t = 8.0, r_x1 = 8.0, r_x2 = 8.0;
  int m_t = 65, m_x1 = 128, m_x2 = 128;

  SpacetimeGrid() = default;
  SpacetimeGrid(double rt, double rx1, double rx2, int mt, int mx1, int mx2)
      : r_t(rt), r_x1(rx1), r_x2(rx2), m_t(mt), m_x1(mx1), m_x2(mx2) {
    if (m_t < 2 || m_x1 < 2 || m_x2 < 2) throw input_error("grid: need at least 2 samples per axis");
    if (!(r_t > 0 && r_x1 > 0 && r_x2 > 0)) throw input_error("grid: half-widths must be positive");
  }
  // Isotropic construction used by the CLI: Rt,Rx,Mt,Mx.
  SpacetimeGrid(double rt, double rx, int mt, int mx) : SpacetimeGrid(rt, rx, rx, mt, mx, mx) {}

  double h_t() const { return 2.0 * r_t / m_t; }
  double h_x1() const { return 2.0 * r_x1 / m_x1; }
  double h_x2() const { return 2.0 * r_x2 / m_x2; }
  double volume_element() const { return h_t() * h_x1() * h_x2(); }

  double t_at(int i) const { return (i - m_t / 2) * h_t(); }
  double x1_at(int i) const { return (i - m_x1 / 2) * h_x1(); }
  double x2_at(int i) const { return (i - m_x2 / 2) * h_x2(); }

  std::size_t samples() const {
    return static_cast<std::size_t>(m_t) * m_x1 * m_x2;
  }

  friend bool operator==(const SpacetimeGrid& a, const SpacetimeGrid& b) {
    return a.r_t == b.r_t && a.r_x1 == b.r_x1 && a.r_x2 == b.r_x2 && a.m_t == b.m_t &&
           a.m_x1 == b.m_x1 && a.m_x2 == b.m_x2;
  }
};

// Grid on which the field of a set rescaled by (x1,x2) -> (2^-a x1, 2^-b x2)
// matches the original sample-for-sample: (t,x) -> (t*2^(a+b), x1*2^a, x2*2^b).
inline SpacetimeGrid matched_grid(const SpacetimeGrid& g, int a, int b) {
  double sa = static_cast<double>(std::int64_t(1) << a);
  double sb = static_cast<double>(std::int64_t(1) << b);
  return SpacetimeGrid(g.r_t * sa * sb, g.r_x1 * sa, g.r_x2 * sb, g.m_t, g.m_x1, g.m_x2);
}

// Nested sequence for tail studies: extent and sample count double together,
// so each lattice contains the previous one and truncated norms can only grow.
std::vector<SpacetimeGrid> nested_grids(const SpacetimeGrid& base, int levels);

}  // namespace hypar
