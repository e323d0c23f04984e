#include "hypar/extension.hpp"

#include <cmath>
#include <numbers>

#include "hypar/kernels.hpp"
#include "hypar/parallel.hpp"

namespace hypar {

namespace {

// Flattened midpoint rule: one entry per (cell, subcell), in cell order with
// subcells row-major.  Columns and rows index the distinct subcell abscissae.
struct QuadLattice {
  std::vector<double> c1;  // per column slot
  std::vector<double> c2;  // per row slot
  struct Entry {
    std::int32_t col = 0, row = 0;
    double wr = 0.0, wi = 0.0;  // weight * subcell area
    double c12 = 0.0;           // c1 * c2
  };
  std::vector<Entry> entries;
};

QuadLattice build_lattice(const Density& f, const QuadratureSpec& quad) {
  const CellSet& s = f.support;
  const int n = s.resolution();
  const int o1 = quad.oversample1, o2 = quad.oversample2;
  const double inv1 = 1.0 / (static_cast<double>(o1) * (std::int64_t(1) << n));
  const double inv2 = 1.0 / (static_cast<double>(o2) * (std::int64_t(1) << n));
  const double area = std::ldexp(1.0, -2 * n) / (o1 * o2);

  QuadLattice lat;
  std::vector<std::int64_t> colkey, rowkey;
  for (const Cell& c : s.cells()) {
    for (int u = 0; u < o1; ++u) colkey.push_back(std::int64_t(c.first) * o1 + u);
    for (int v = 0; v < o2; ++v) rowkey.push_back(std::int64_t(c.second) * o2 + v);
  }
  std::sort(colkey.begin(), colkey.end());
  colkey.erase(std::unique(colkey.begin(), colkey.end()), colkey.end());
  std::sort(rowkey.begin(), rowkey.end());
  rowkey.erase(std::unique(rowkey.begin(), rowkey.end()), rowkey.end());
  for (std::int64_t k : colkey) lat.c1.push_back((static_cast<double>(k) + 0.5) * inv1);
  for (std::int64_t k : rowkey) lat.c2.push_back((static_cast<double>(k) + 0.5) * inv2);

  auto slot = [](const std::vector<std::int64_t>& keys, std::int64_t k) {
    return static_cast<std::int32_t>(std::lower_bound(keys.begin(), keys.end(), k) - keys.begin());
  };

  lat.entries.reserve(s.size() * o1 * o2);
  for (std::size_t ci = 0; ci < s.cells().size(); ++ci) {
    const Cell& c = s.cells()[ci];
    std::complex<double> w =
        f.weights ? (*f.weights)[ci] : std::complex<double>(1.0, 0.0);
    for (int u = 0; u < o1; ++u) {
      for (int v = 0; v < o2; ++v) {
        QuadLattice::Entry e;
        e.col = slot(colkey, std::int64_t(c.first) * o1 + u);
        e.row = slot(rowkey, std::int64_t(c.second) * o2 + v);
        e.wr = w.real() * area;
        e.wi = w.imag() * area;
        e.c12 = lat.c1[e.col] * lat.c2[e.row];
        lat.entries.push_back(e);
      }
    }
  }
  return lat;
}

void check_aliasing(const CellSet& s, const SpacetimeGrid& g) {
  const double limit = std::numbers::pi * std::ldexp(1.0, s.resolution());
  if (g.h_x1() >= limit || g.h_x2() >= limit)
    throw numeric_error("extend: spatial lattice too coarse for the cell lattice (aliasing)");
}

// Phase table cis(x_axis(i) * c) for every (abscissa, sample) pair.
struct PhaseTable {
  std::vector<double> re, im;  // [slot * m + i]
  int m = 0;
};

PhaseTable phase_table(const std::vector<double>& cs, int m, double h, int mhalf) {
  PhaseTable t;
  t.m = m;
  t.re.resize(cs.size() * m);
  t.im.resize(cs.size() * m);
  for (std::size_t s = 0; s < cs.size(); ++s) {
    for (int i = 0; i < m; ++i) {
      double phase = (i - mhalf) * h * cs[s];
      t.re[s * m + i] = std::cos(phase);
      t.im[s * m + i] = std::sin(phase);
    }
  }
  return t;
}

void eval_slice_transform(const QuadLattice& lat, const SpacetimeGrid& g, Field& out, int threads) {
  const PhaseTable a1 = phase_table(lat.c1, g.m_x1, g.h_x1(), g.m_x1 / 2);
  const PhaseTable a2 = phase_table(lat.c2, g.m_x2, g.h_x2(), g.m_x2 / 2);
  const std::size_t q = lat.c2.size();

  parallel_for(g.m_t, threads, [&](std::size_t it) {
    const double t = g.t_at(static_cast<int>(it));
    std::vector<double> tr(q * g.m_x1, 0.0), ti(q * g.m_x1, 0.0);
    for (const auto& e : lat.entries) {
      const double mr = std::cos(t * e.c12), mi = std::sin(t * e.c12);
      const double gr = e.wr * mr - e.wi * mi;
      const double gi = e.wr * mi + e.wi * mr;
      kernels::caxpy(g.m_x1, gr, gi, &a1.re[std::size_t(e.col) * g.m_x1],
                     &a1.im[std::size_t(e.col) * g.m_x1], &tr[std::size_t(e.row) * g.m_x1],
                     &ti[std::size_t(e.row) * g.m_x1]);
    }
    double* fr = out.re().data() + it * std::size_t(g.m_x1) * g.m_x2;
    double* fi = out.im().data() + it * std::size_t(g.m_x1) * g.m_x2;
    for (std::size_t rq = 0; rq < q; ++rq) {
      for (int i1 = 0; i1 < g.m_x1; ++i1) {
        kernels::caxpy(g.m_x2, tr[rq * g.m_x1 + i1], ti[rq * g.m_x1 + i1],
                       &a2.re[rq * g.m_x2], &a2.im[rq * g.m_x2],
                       fr + std::size_t(i1) * g.m_x2, fi + std::size_t(i1) * g.m_x2);
      }
    }
  });
}

void eval_direct(const QuadLattice& lat, const SpacetimeGrid& g, Field& out, int threads) {
  parallel_for(g.m_t, threads, [&](std::size_t it) {
    const double t = g.t_at(static_cast<int>(it));
    for (int i1 = 0; i1 < g.m_x1; ++i1) {
      const double x1 = g.x1_at(i1);
      for (int i2 = 0; i2 < g.m_x2; ++i2) {
        const double x2 = g.x2_at(i2);
        double sr = 0.0, si = 0.0;
        for (const auto& e : lat.entries) {
          const double phase = t * e.c12 + x1 * lat.c1[e.col] + x2 * lat.c2[e.row];
          const double cr = std::cos(phase), ci = std::sin(phase);
          sr += e.wr * cr - e.wi * ci;
          si += e.wr * ci + e.wi * cr;
        }
        std::size_t k = out.index(static_cast<int>(it), i1, i2);
        out.re()[k] = sr;
        out.im()[k] = si;
      }
    }
  });
}

}  // namespace

Field extend(const Density& f, const SpacetimeGrid& grid, const QuadratureSpec& quad,
             int threads) {
  quad.validate();
  check_aliasing(f.support, grid);
  Field out(grid);
  if (f.support.empty()) return out;
  QuadLattice lat = build_lattice(f, quad);
  if (quad.path == EvalPath::Direct)
    eval_direct(lat, grid, out, threads);
  else
    eval_slice_transform(lat, grid, out, threads);
  return out;
}

double lp_norm(const Field& f, double p) {
  if (!(p > 0)) throw input_error("lp_norm: exponent must be positive");
  if (!f.all_finite()) throw numeric_error("lp_norm: non-finite samples");
  const double half_p = 0.5 * p;
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double m2 = f.re()[i] * f.re()[i] + f.im()[i] * f.im()[i];
    terms[i] = std::pow(m2, half_p);
  }
  double s = pairwise_sum(terms);
  return std::pow(f.grid().volume_element() * s, 1.0 / p);
}

double product_lp_norm(const std::vector<const Field*>& fields, double p) {
  require(!fields.empty(), "product_lp_norm: no fields");
  const std::size_t n = fields[0]->size();
  for (const Field* f : fields) {
    require(f->size() == n && f->grid() == fields[0]->grid(),
            "product_lp_norm: fields on different grids");
    if (!f->all_finite()) throw numeric_error("product_lp_norm: non-finite samples");
  }
  const double half_p = 0.5 * p;
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m2 = 1.0;
    for (const Field* f : fields) m2 *= f->re()[i] * f->re()[i] + f->im()[i] * f->im()[i];
    terms[i] = std::pow(m2, half_p);
  }
  double s = pairwise_sum(terms);
  return std::pow(fields[0]->grid().volume_element() * s, 1.0 / p);
}

Field field_sum(const std::vector<const Field*>& fields) {
  require(!fields.empty(), "field_sum: no fields");
  Field out(fields[0]->grid());
  for (const Field* f : fields) {
    require(f->grid() == out.grid(), "field_sum: fields on different grids");
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.re()[i] += f->re()[i];
      out.im()[i] += f->im()[i];
    }
  }
  return out;
}

double bilinear_norm(const Density& f, const Density& g, const SpacetimeGrid& grid,
                     const ExponentPair& e, const QuadratureSpec& quad, int threads) {
  Field ff = extend(f, grid, quad, threads);
  Field fg = extend(g, grid, quad, threads);
  return product_lp_norm({&ff, &fg}, e.s.to_double());
}

double ratio(const CellSet& set, const ExponentPair& e, const SpacetimeGrid& grid,
             const QuadratureSpec& quad, int threads) {
  if (set.empty()) throw input_error("ratio: empty set");
  Field f = extend(Density(set), grid, quad, threads);
  double num = lp_norm(f, e.two_s().to_double());
  double inv_sp = (Rational(1) / e.s_prime()).to_double();
  return num / std::pow(set.measure().to_double(), inv_sp);
}

Density parabolic_rescale(const Density& f, int a, int b) {
  if (a < 0 || b < 0) throw input_error("parabolic_rescale: exponents must be nonnegative");
  const int n = f.support.resolution();
  const int d = std::max(a, b);
  if (n + d > kScaleMax) throw input_error("parabolic_rescale: resolution overflow");
  const int du = d - a, dv = d - b;  // subcells per original cell, per axis
  std::vector<Cell> cells;
  std::vector<std::complex<double>> weights;
  const bool weighted = f.weights.has_value();
  cells.reserve(f.support.size() << (du + dv));
  for (std::size_t ci = 0; ci < f.support.cells().size(); ++ci) {
    const Cell& c = f.support.cells()[ci];
    for (std::int32_t u = 0; u < (1 << du); ++u) {
      for (std::int32_t v = 0; v < (1 << dv); ++v) {
        cells.emplace_back((c.first << du) + u, (c.second << dv) + v);
        if (weighted) weights.push_back((*f.weights)[ci]);
      }
    }
  }
  std::sort(cells.begin(), cells.end());
  CellSet s(n + d, f.support.domain(), std::move(cells));
  if (weighted) return Density(std::move(s), std::move(weights));
  return Density(std::move(s));
}

Field extend_matched_source(const Density& f, const SpacetimeGrid& grid, int a, int b,
                            int oversample, int threads) {
  const int d = std::max(a, b);
  QuadratureSpec q = QuadratureSpec::anisotropic(oversample << (d - a), oversample << (d - b));
  return extend(f, grid, q, threads);
}

TailReport tail_report(const CellSet& set, const ExponentPair& e,
                       const std::vector<SpacetimeGrid>& grids, const QuadratureSpec& quad,
                       int threads) {
  if (grids.size() < 2) throw input_error("tail_report: need at least two grids");
  TailReport rep;
  const double p = e.two_s().to_double();
  for (const auto& g : grids) {
    double nrm = set.empty() ? 0.0 : lp_norm(extend(Density(set), g, quad, threads), p);
    rep.rows.push_back({g, nrm});
  }
  double scale = rep.rows.back().norm;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    if (rep.rows[i + 1].norm < rep.rows[i].norm - 1e-12 * scale)
      throw invariant_error("tail_report: norm sequence not monotone (quadrature bug)");
  }
  std::vector<double> inc;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
    inc.push_back(rep.rows[i + 1].norm - rep.rows[i].norm);
  rep.extrapolated = rep.rows.back().norm;
  if (inc.size() >= 2 && inc.front() > 0.0) {
    double qsum = 0.0;
    int qcnt = 0;
    for (std::size_t i = 0; i + 1 < inc.size(); ++i) {
      if (inc[i] > 0.0) {
        qsum += inc[i + 1] / inc[i];
        ++qcnt;
      }
    }
    if (qcnt > 0) {
      rep.decay_ratio = qsum / qcnt;
      if (rep.decay_ratio < 0.95) {
        rep.converged = true;
        double corr = inc.back() * rep.decay_ratio / (1.0 - rep.decay_ratio);
        rep.extrapolated = rep.rows.back().norm + corr;
        rep.uncertainty = corr;
      }
    }
  } else if (inc.empty() || inc.back() == 0.0) {
    rep.converged = true;
  }
  return rep;
}

std::vector<SpacetimeGrid> nested_grids(const SpacetimeGrid& base, int levels) {
  std::vector<SpacetimeGrid> out;
  SpacetimeGrid g = base;
  for (int i = 0; i < levels; ++i) {
    out.push_back(g);
    g = SpacetimeGrid(2 * g.r_t, 2 * g.r_x1, 2 * g.r_x2, 2 * g.m_t, 2 * g.m_x1, 2 * g.m_x2);
  }
  return out;
}

}  // namespace hypar
