#pragma once

#include <cstdint>
#include <random>

namespace hypar {

// All randomness flows through mt19937_64 with explicit mappings; the
// standard distributions vary across library implementations, these do not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : eng_() % n; }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool coin(double p) { return unit() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hypar
