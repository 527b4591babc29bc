#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mecanav {

/// SplitMix64 finalizer. Used to spread structured seed material (trial
/// indices, stream ids) across the full 64-bit space before it reaches the
/// engine, so that nearby seeds do not produce correlated streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives a child seed from a base seed and a key. Deterministic, and
/// distinct keys give statistically independent children.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key) {
  return splitmix64(base ^ splitmix64(key + 0x632BE59BD9B4E019ull));
}

/// Deterministic random stream. All draws go through explicit integer to
/// double conversions and an explicit Box-Muller transform rather than the
/// standard library distributions, whose output is implementation defined;
/// the same seed therefore yields bit-identical sequences on any platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : seed_(seed), engine_(splitmix64(seed)) {}

  /// Independent child stream. Derivation uses only the constructor seed,
  /// never the engine state, so substreams may be split off at any time.
  RngStream substream(std::uint64_t stream) const {
    return RngStream(derive_seed(seed_, stream));
  }

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. Caches the second deviate.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();  // log(0) guard
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Zero-mean normal deviate with the given variance. Variance zero
  /// returns exactly zero without consuming randomness, so disabling a
  /// noise group does not shift the remaining draws.
  double gaussian_with_variance(double variance) {
    if (variance == 0.0) return 0.0;
    return gaussian() * std::sqrt(variance);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mecanav
