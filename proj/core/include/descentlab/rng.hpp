#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace descentlab {

// Splittable 64-bit generator (splitmix64 core). Every consumer of
// randomness in the project derives its own substream from a (seed,
// stream_id) pair, so latents, projections, noise draws and shuffles are
// independent and any run is a pure function of its seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Mixed seed for a (seed, stream_id) pair; distinct ids give
  // uncorrelated sequences.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
    return mix(seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1));
  }

  // Derives an independent stream from the base seed.
  static Rng substream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(derive_seed(seed, stream_id));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired value is cached.
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(t);
    has_cached_ = true;
    return r * std::cos(t);
  }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Stream ids used across the project. Keeping them in one place avoids
// accidental reuse of the same substream for two purposes.
namespace streams {
inline constexpr std::uint64_t latents_train = 1;
inline constexpr std::uint64_t latents_test = 2;
inline constexpr std::uint64_t projection = 3;
inline constexpr std::uint64_t projection_shift = 4;
inline constexpr std::uint64_t sample_noise = 5;
inline constexpr std::uint64_t feature_mask = 6;
inline constexpr std::uint64_t feature_noise = 7;
inline constexpr std::uint64_t anomaly_rows = 8;
inline constexpr std::uint64_t anomaly_values = 9;
inline constexpr std::uint64_t model_init = 10;
inline constexpr std::uint64_t shuffle = 11;
inline constexpr std::uint64_t eval_anomalies = 12;
inline constexpr std::uint64_t real_noise = 13;
inline constexpr std::uint64_t real_split = 14;
}  // namespace streams

}  // namespace descentlab
