#pragma once

#include <cstdint>

namespace freep {

/// Deterministic 64-bit generator (splitmix64). Used instead of <random>
/// engines plus distributions so that sampled streams are identical across
/// standard library implementations; reports must be byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  /// Uniform integer in [0, n). Modulo bias is irrelevant at these ranges.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  int index(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream for (seed, k); stable fan-out for trials.
inline Rng substream(std::uint64_t seed, std::uint64_t k) {
  Rng mixer(seed ^ (0x632be59bd9b4e019ULL * (k + 1)));
  return Rng(mixer.next());
}

}  // namespace freep
