#include "hypar/search.hpp"

#include <cmath>
#include <optional>

#include "hypar/rng.hpp"

namespace hypar {

namespace {

std::int64_t rect_cells_per_axis(int n, int side_log2) { return std::int64_t(1) << (n - side_log2); }

bool rects_overlap(int n, const Rect& a, const Rect& b) {
  std::int64_t aw = rect_cells_per_axis(n, a.w_log2), ah = rect_cells_per_axis(n, a.h_log2);
  std::int64_t bw = rect_cells_per_axis(n, b.w_log2), bh = rect_cells_per_axis(n, b.h_log2);
  bool x = a.x0 < b.x0 + bw && b.x0 < a.x0 + aw;
  bool y = a.y0 < b.y0 + bh && b.y0 < a.y0 + ah;
  return x && y;
}

bool rect_in_domain(int n, Domain dom, const Rect& r) {
  if (r.w_log2 < 0 || r.w_log2 > n || r.h_log2 < 0 || r.h_log2 > n) return false;
  std::int64_t w = rect_cells_per_axis(n, r.w_log2), h = rect_cells_per_axis(n, r.h_log2);
  return r.x0 >= lo_index(dom, n) && r.x0 + w <= hi_index(dom, n) && r.y0 >= lo_index(dom, n) &&
         r.y0 + h <= hi_index(dom, n);
}

Rational rect_measure(const Rect& r) {
  return Rational(1, std::int64_t(1) << (r.w_log2 + r.h_log2));
}

bool valid_with(const Configuration& c, const std::vector<Rect>& rects) {
  for (std::size_t i = 0; i < rects.size(); ++i) {
    if (!rect_in_domain(c.resolution(), c.domain(), rects[i])) return false;
    for (std::size_t j = i + 1; j < rects.size(); ++j)
      if (rects_overlap(c.resolution(), rects[i], rects[j])) return false;
  }
  return true;
}

}  // namespace

Configuration::Configuration(int resolution, Domain dom, std::vector<Rect> rects, Rational budget)
    : n_(resolution), dom_(dom), rects_(std::move(rects)), budget_(budget) {
  check_scale(n_);
  Rational total(0);
  for (std::size_t i = 0; i < rects_.size(); ++i) {
    if (!rect_in_domain(n_, dom_, rects_[i])) throw input_error("configuration: rect out of domain");
    total = total + rect_measure(rects_[i]);
    for (std::size_t j = i + 1; j < rects_.size(); ++j)
      if (rects_overlap(n_, rects_[i], rects_[j]))
        throw input_error("configuration: overlapping rects");
  }
  if (!(total == budget_)) throw input_error("configuration: measure does not meet the budget");
  std::sort(rects_.begin(), rects_.end());
}

CellSet Configuration::cells() const {
  std::vector<Cell> cells;
  for (const Rect& r : rects_) {
    std::int64_t w = rect_cells_per_axis(n_, r.w_log2), h = rect_cells_per_axis(n_, r.h_log2);
    for (std::int64_t x = 0; x < w; ++x)
      for (std::int64_t y = 0; y < h; ++y)
        cells.emplace_back(r.x0 + static_cast<std::int32_t>(x),
                           r.y0 + static_cast<std::int32_t>(y));
  }
  std::sort(cells.begin(), cells.end());
  return CellSet(n_, dom_, std::move(cells));
}

Configuration Configuration::single_tile(int resolution, Domain dom, int j, int k) {
  Rect r{j, k, 0, 0};
  return Configuration(resolution, dom, {r}, Rational(1, std::int64_t(1) << (j + k)));
}

namespace {

// Move kinds, in the weight order of SearchParams.
enum class MoveKind { SplitRelocate, Merge, Translate, AspectSwap };

const char* move_name(MoveKind k) {
  switch (k) {
    case MoveKind::SplitRelocate: return "split";
    case MoveKind::Merge: return "merge";
    case MoveKind::Translate: return "translate";
    case MoveKind::AspectSwap: return "aspect";
  }
  return "?";
}

std::vector<Rect> without(const std::vector<Rect>& rects, std::size_t i) {
  std::vector<Rect> out;
  out.reserve(rects.size() - 1);
  for (std::size_t k = 0; k < rects.size(); ++k)
    if (k != i) out.push_back(rects[k]);
  return out;
}

// Merge partner: equal rects sharing a full edge so the union is again a
// power-of-two rect.
bool mergeable(int n, const Rect& a, const Rect& b, Rect& merged) {
  if (a.w_log2 != b.w_log2 || a.h_log2 != b.h_log2) return false;
  std::int64_t w = rect_cells_per_axis(n, a.w_log2), h = rect_cells_per_axis(n, a.h_log2);
  if (a.y0 == b.y0 && b.x0 == a.x0 + w && a.w_log2 >= 1) {
    merged = Rect{a.w_log2 - 1, a.h_log2, a.x0, a.y0};
    return true;
  }
  if (a.x0 == b.x0 && b.y0 == a.y0 + h && a.h_log2 >= 1) {
    merged = Rect{a.w_log2, a.h_log2 - 1, a.x0, a.y0};
    return true;
  }
  return false;
}

}  // namespace

std::vector<Configuration> local_moves(const Configuration& c) {
  const int n = c.resolution();
  std::vector<Configuration> out;
  auto push_if_valid = [&](std::vector<Rect> rects) {
    if (!valid_with(c, rects)) return;
    out.emplace_back(n, c.domain(), std::move(rects), c.budget());
  };

  for (std::size_t i = 0; i < c.rects().size(); ++i) {
    const Rect& r = c.rects()[i];
    std::int64_t w = rect_cells_per_axis(n, r.w_log2), h = rect_cells_per_axis(n, r.h_log2);

    // split along an axis and relocate one half anywhere it fits
    for (int axis = 0; axis < 2; ++axis) {
      Rect kept = r, moved = r;
      if (axis == 0) {
        if (r.w_log2 >= n) continue;
        kept.w_log2 = moved.w_log2 = r.w_log2 + 1;
      } else {
        if (r.h_log2 >= n) continue;
        kept.h_log2 = moved.h_log2 = r.h_log2 + 1;
      }
      std::int64_t mw = rect_cells_per_axis(n, moved.w_log2);
      std::int64_t mh = rect_cells_per_axis(n, moved.h_log2);
      for (std::int64_t x = lo_index(c.domain(), n); x + mw <= hi_index(c.domain(), n); x += mw) {
        for (std::int64_t y = lo_index(c.domain(), n); y + mh <= hi_index(c.domain(), n);
             y += mh) {
          moved.x0 = static_cast<std::int32_t>(x);
          moved.y0 = static_cast<std::int32_t>(y);
          if (moved == kept) continue;
          std::vector<Rect> rects = without(c.rects(), i);
          rects.push_back(kept);
          rects.push_back(moved);
          push_if_valid(std::move(rects));
        }
      }
    }

    // merge with a sibling
    for (std::size_t j = 0; j < c.rects().size(); ++j) {
      if (j == i) continue;
      Rect merged;
      if (mergeable(n, r, c.rects()[j], merged)) {
        std::vector<Rect> rects;
        for (std::size_t k = 0; k < c.rects().size(); ++k)
          if (k != i && k != j) rects.push_back(c.rects()[k]);
        rects.push_back(merged);
        push_if_valid(std::move(rects));
      }
    }

    // translate by one cell
    const std::int32_t dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      std::vector<Rect> rects = c.rects();
      rects[i].x0 += dx[d];
      rects[i].y0 += dy[d];
      push_if_valid(std::move(rects));
    }

    // aspect swap 2^-j x 2^-k -> 2^-(j+1) x 2^-(k-1) and the reverse
    for (int dir : {+1, -1}) {
      Rect swapped = r;
      swapped.w_log2 += dir;
      swapped.h_log2 -= dir;
      if (swapped.w_log2 < 0 || swapped.h_log2 < 0) continue;
      std::vector<Rect> rects = c.rects();
      rects[i] = swapped;
      push_if_valid(std::move(rects));
    }
    (void)w;
    (void)h;
  }
  return out;
}

namespace {

// One random proposal of the given kind; empty when the kind has no legal
// move from this state.
std::optional<Configuration> propose(const Configuration& c, MoveKind kind, Rng& rng) {
  const int n = c.resolution();
  if (c.rects().empty()) return std::nullopt;
  std::size_t i = static_cast<std::size_t>(rng.below(c.rects().size()));
  const Rect& r = c.rects()[i];

  auto finish = [&](std::vector<Rect> rects) -> std::optional<Configuration> {
    if (!valid_with(c, rects)) return std::nullopt;
    return Configuration(n, c.domain(), std::move(rects), c.budget());
  };

  switch (kind) {
    case MoveKind::SplitRelocate: {
      int axis = static_cast<int>(rng.below(2));
      Rect kept = r, moved = r;
      if (axis == 0) {
        if (r.w_log2 >= n) return std::nullopt;
        kept.w_log2 = moved.w_log2 = r.w_log2 + 1;
      } else {
        if (r.h_log2 >= n) return std::nullopt;
        kept.h_log2 = moved.h_log2 = r.h_log2 + 1;
      }
      std::int64_t mw = rect_cells_per_axis(n, moved.w_log2);
      std::int64_t mh = rect_cells_per_axis(n, moved.h_log2);
      std::int64_t nx = (hi_index(c.domain(), n) - lo_index(c.domain(), n)) / mw;
      std::int64_t ny = (hi_index(c.domain(), n) - lo_index(c.domain(), n)) / mh;
      moved.x0 = static_cast<std::int32_t>(lo_index(c.domain(), n) +
                                           mw * static_cast<std::int64_t>(rng.below(nx)));
      moved.y0 = static_cast<std::int32_t>(lo_index(c.domain(), n) +
                                           mh * static_cast<std::int64_t>(rng.below(ny)));
      if (moved == kept) return std::nullopt;
      std::vector<Rect> rects = without(c.rects(), i);
      rects.push_back(kept);
      rects.push_back(moved);
      return finish(std::move(rects));
    }
    case MoveKind::Merge: {
      for (std::size_t j = 0; j < c.rects().size(); ++j) {
        if (j == i) continue;
        Rect merged;
        if (mergeable(n, r, c.rects()[j], merged)) {
          std::vector<Rect> rects;
          for (std::size_t k = 0; k < c.rects().size(); ++k)
            if (k != i && k != j) rects.push_back(c.rects()[k]);
          rects.push_back(merged);
          return finish(std::move(rects));
        }
      }
      return std::nullopt;
    }
    case MoveKind::Translate: {
      const std::int32_t dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
      int d = static_cast<int>(rng.below(4));
      std::vector<Rect> rects = c.rects();
      rects[i].x0 += dx[d];
      rects[i].y0 += dy[d];
      return finish(std::move(rects));
    }
    case MoveKind::AspectSwap: {
      int dir = rng.below(2) == 0 ? +1 : -1;
      Rect swapped = r;
      swapped.w_log2 += dir;
      swapped.h_log2 -= dir;
      if (swapped.w_log2 < 0 || swapped.h_log2 < 0 || swapped.w_log2 > n || swapped.h_log2 > n)
        return std::nullopt;
      std::vector<Rect> rects = c.rects();
      rects[i] = swapped;
      return finish(std::move(rects));
    }
  }
  return std::nullopt;
}

}  // namespace

SearchResult search_extremizer(const ExponentPair& e, const Configuration& start,
                               const SearchParams& params, const SpacetimeGrid& grid,
                               const QuadratureSpec& quad, int threads) {
  params.validate();
  Rng rng(params.seed);
  double wsum = 0.0;
  for (double w : params.move_weights) wsum += w;
  if (!(wsum > 0)) throw input_error("search: move weights sum to zero");

  Configuration current = start;
  double current_ratio = ratio(current.cells(), e, grid, quad, threads);
  SearchResult res{current, current_ratio, {}};
  double temp = params.temp_initial;

  for (int it = 1; it <= params.iterations; ++it) {
    double pick = rng.unit() * wsum;
    MoveKind kind = MoveKind::AspectSwap;
    double acc = 0.0;
    for (int m = 0; m < 4; ++m) {
      acc += params.move_weights[m];
      if (pick < acc) {
        kind = static_cast<MoveKind>(m);
        break;
      }
    }
    std::optional<Configuration> cand = propose(current, kind, rng);
    // The RNG always advances identically; only acceptance depends on the
    // objective, so traces are reproducible bit for bit.
    double u = rng.unit();
    if (cand) {
      require(cand->cells().measure() == current.budget(), "search: budget drifted");
      double cand_ratio = ratio(cand->cells(), e, grid, quad, threads);
      bool accept = cand_ratio > current_ratio;
      if (!accept && temp > 0.0)
        accept = u < std::exp((cand_ratio - current_ratio) / temp);
      if (accept) {
        current = *cand;
        current_ratio = cand_ratio;
        if (current_ratio > res.best_ratio) {
          res.best = current;
          res.best_ratio = current_ratio;
        }
      }
    }
    res.trace.steps.push_back({it, move_name(kind), current_ratio, res.best_ratio});
    temp *= params.temp_decay;
  }
  return res;
}

}  // namespace hypar
