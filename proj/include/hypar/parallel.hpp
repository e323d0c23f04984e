#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace hypar {

// Pairwise (tree) summation with a split rule fixed by index alone.  The
// result is a deterministic function of the input array, independent of
// thread count, chunking or call site.
double pairwise_sum(std::span<const double> v);

// Static slab partition of [0, count) over worker threads.  Each index is
// processed by exactly one thread into caller-owned disjoint storage, so the
// output is identical for every thread count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

// Thread count resolution: explicit argument > 0 wins, otherwise the THREADS
// environment variable, otherwise the hardware count.
int resolve_threads(int requested);

}  // namespace hypar
