#pragma once

#include <cmath>
#include <cstdint>

#include "elliptrack/errors.hpp"
#include "elliptrack/linalg.hpp"

namespace elliptrack {

// Deterministic 64-bit random stream (splitmix64) with explicit sampling
// routines, so simulation results are reproducible bit-for-bit regardless of
// the standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {
    // A few warm-up draws decorrelate streams with small seed differences.
    for (int i = 0; i < 4; ++i) next_u64();
  }

  // Independent stream for Monte Carlo run `run_index` derived from the
  // experiment seed; neighbouring runs share no state.
  static RandomStream for_run(std::uint64_t seed, std::uint64_t run_index) {
    std::uint64_t mix = seed + 0x9e3779b97f4a7c15ull * (run_index + 1);
    return RandomStream(advance(mix));
  }

  std::uint64_t next_u64() { return advance(state_); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via the Marsaglia polar method (caches the spare).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  Vec<2> normal2() {
    const double a = normal();
    const double b = normal();
    return Vec<2>(a, b);
  }

  // Poisson count by Knuth's product-of-uniforms; adequate for rates up to
  // a few hundred.
  int poisson(double rate) {
    if (!(rate >= 0.0)) {
      throw ContractViolation("poisson rate must be non-negative");
    }
    const double threshold = std::exp(-rate);
    int count = -1;
    double product = 1.0;
    do {
      ++count;
      product *= uniform01();
    } while (product > threshold);
    return count;
  }

  // Uniform sample on the closed unit disk by rejection from the square.
  Vec<2> uniform_unit_disk() {
    double x, y;
    do {
      x = 2.0 * uniform01() - 1.0;
      y = 2.0 * uniform01() - 1.0;
    } while (x * x + y * y > 1.0);
    return Vec<2>(x, y);
  }

 private:
  static std::uint64_t advance(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace elliptrack
