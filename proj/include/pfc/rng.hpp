#pragma once

#include <cstdint>
#include <random>

namespace pfc {

/// Seeded generator with explicitly specified output mapping.
///
/// std::uniform_real_distribution is not pinned down by the standard, so the
/// scans and family generators draw through this wrapper instead; results are
/// then reproducible for a given seed independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free modulo bias is irrelevant at these sizes, but stay exact anyway.
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = bits();
    } while (x >= limit);
    return x % n;
  }

  /// Derive an independent child stream (used to give each random family its own seed).
  std::uint64_t fork() { return bits() ^ 0x9e3779b97f4a7c15ull; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pfc
