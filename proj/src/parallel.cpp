#include "hypar/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hypar {

namespace {
double pairwise_sum_rec(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum_rec(v, half) + pairwise_sum_rec(v + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_sum_rec(v.data(), v.size()); }

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::size_t nw = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += nw) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace hypar
