#pragma once

// Independent reference for the field evaluator: a verbatim midpoint-rule
// sum in extended precision, one flat loop per sample, sharing no code with
// the production evaluation paths.

#include <cmath>
#include <complex>

#include "hypar/extension.hpp"

namespace hypar::testing {

inline std::complex<long double> direct_eval(const Density& f, long double t, long double x1,
                                             long double x2, int o1 = 1, int o2 = 1) {
  const CellSet& s = f.support;
  const int n = s.resolution();
  const long double cell = std::ldexp(1.0L, -n);
  const long double area = cell * cell / (static_cast<long double>(o1) * o2);
  long double sr = 0.0L, si = 0.0L;
  for (std::size_t ci = 0; ci < s.cells().size(); ++ci) {
    const Cell& c = s.cells()[ci];
    std::complex<long double> w(1.0L, 0.0L);
    if (f.weights) w = std::complex<long double>((*f.weights)[ci].real(), (*f.weights)[ci].imag());
    for (int u = 0; u < o1; ++u) {
      for (int v = 0; v < o2; ++v) {
        long double c1 = (c.first + (u + 0.5L) / o1) * cell;
        long double c2 = (c.second + (v + 0.5L) / o2) * cell;
        long double phase = t * c1 * c2 + x1 * c1 + x2 * c2;
        long double cr = std::cos(phase), cs = std::sin(phase);
        sr += area * (w.real() * cr - w.imag() * cs);
        si += area * (w.real() * cs + w.imag() * cr);
      }
    }
  }
  return {sr, si};
}

// Full-grid L^p norm through the same extended-precision path.
inline long double direct_lp_norm(const Density& f, const SpacetimeGrid& g, long double p) {
  long double sum = 0.0L;
  for (int it = 0; it < g.m_t; ++it) {
    for (int i1 = 0; i1 < g.m_x1; ++i1) {
      for (int i2 = 0; i2 < g.m_x2; ++i2) {
        auto v = direct_eval(f, g.t_at(it), g.x1_at(i1), g.x2_at(i2));
        long double m2 = v.real() * v.real() + v.imag() * v.imag();
        sum += std::pow(m2, p / 2.0L);
      }
    }
  }
  return std::pow(static_cast<long double>(g.volume_element()) * sum, 1.0L / p);
}

}  // namespace hypar::testing
