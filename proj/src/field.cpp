#include "hypar/field.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <istream>

#include "hypar/errors.hpp"

namespace hypar {

double Field::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < re_.size(); ++i)
    m = std::max(m, std::hypot(re_[i], im_[i]));
  return m;
}

bool Field::all_finite() const {
  for (std::size_t i = 0; i < re_.size(); ++i)
    if (!std::isfinite(re_[i]) || !std::isfinite(im_[i])) return false;
  return true;
}

namespace {
template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw input_error("field dump: truncated stream");
  return v;
}
}  // namespace

void write_field(const Field& f, std::ostream& os) {
  const SpacetimeGrid& g = f.grid();
  if (g.m_x1 != g.m_x2 || g.r_x1 != g.r_x2)
    throw input_error("field dump: anisotropic grids are not dumpable");
  put<std::uint64_t>(os, static_cast<std::uint64_t>(g.m_t));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(g.m_x1));
  put<double>(os, g.r_t);
  put<double>(os, g.r_x1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    put<double>(os, f.re()[i]);
    put<double>(os, f.im()[i]);
  }
}

Field read_field(std::istream& is) {
  auto mt = get<std::uint64_t>(is);
  auto mx = get<std::uint64_t>(is);
  auto rt = get<double>(is);
  auto rx = get<double>(is);
  Field f(SpacetimeGrid(rt, rx, static_cast<int>(mt), static_cast<int>(mx)));
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.re()[i] = get<double>(is);
    f.im()[i] = get<double>(is);
  }
  return f;
}

void write_abs_slice_csv(const Field& f, int it, std::ostream& os) {
  const SpacetimeGrid& g = f.grid();
  if (it < 0 || it >= g.m_t) throw input_error("slice csv: slice index out of range");
  os << "x1,x2,abs\n";
  char buf[96];
  for (int i1 = 0; i1 < g.m_x1; ++i1) {
    for (int i2 = 0; i2 < g.m_x2; ++i2) {
      auto v = f.at(it, i1, i2);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.x1_at(i1), g.x2_at(i2),
                    std::abs(v));
      os << buf;
    }
  }
}

}  // namespace hypar
