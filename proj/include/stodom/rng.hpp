#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stodom {

/// SplitMix64 finalizer; mixes a seed and a stream index into an
/// independent-looking 64-bit seed. Replicate i of a run always uses
/// derive_seed(seed, i), whatever the scheduling.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Thin wrapper over mt19937_64 with portable (library-independent)
/// transforms so that outputs are bit-reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Exponential(rate) by inversion; +inf for rate 0.
  double exponential(double rate) {
    if (rate <= 0.0) return HUGE_VAL;
    return -std::log(uniform()) / rate;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stodom
