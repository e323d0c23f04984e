#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypar/grid.hpp"

namespace hypar {

// Complex samples of an extension field on a spacetime grid, stored as split
// re/im arrays in (i_t, i_x1, i_x2) row-major order.
class Field {
 public:
  Field() = default;
  explicit Field(const SpacetimeGrid& g)
      : grid_(g), re_(g.samples(), 0.0), im_(g.samples(), 0.0) {}

  const SpacetimeGrid& grid() const { return grid_; }
  std::size_t size() const { return re_.size(); }

  std::size_t index(int it, int i1, int i2) const {
    return (static_cast<std::size_t>(it) * grid_.m_x1 + i1) * grid_.m_x2 + i2;
  }
  std::complex<double> at(int it, int i1, int i2) const {
    std::size_t k = index(it, i1, i2);
    return {re_[k], im_[k]};
  }

  std::vector<double>& re() { return re_; }
  std::vector<double>& im() { return im_; }
  const std::vector<double>& re() const { return re_; }
  const std::vector<double>& im() const { return im_; }

  double max_abs() const;
  bool all_finite() const;

 private:
  SpacetimeGrid grid_;
  std::vector<double> re_, im_;
};

// Binary dump: little-endian header (M_t, M_x as u64, R_t, R_x as f64)
// followed by interleaved re/im f64 pairs in (i_t, i_x1, i_x2) row-major
// order.  Only isotropic grids (shared M_x, R_x across the two spatial axes)
// are dumpable; those are the only grids the CLI builds.
void write_field(const Field& f, std::ostream& os);
Field read_field(std::istream& is);

// CSV of |F| over one t-slice: header "x1,x2,abs", one row per sample.
void write_abs_slice_csv(const Field& f, int it, std::ostream& os);

}  // namespace hypar
