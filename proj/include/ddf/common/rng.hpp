#pragma once

#include <cstdint>

#include "ddf/common/types.hpp"

namespace ddf {

/// Counter-based 64-bit generator.
///
/// Output i of a stream is `mix64(key + (i + 1) * kGolden)` where `mix64` is
/// the SplitMix64 finalizer and `key` identifies the stream. Because every
/// output is a pure function of (key, counter), sequences are reproducible
/// across implementations and can be skipped ahead in O(1).
///
/// Streams are split with `Rng::stream(seed, id)`, whose key is
/// `mix64(seed ^ mix64(id + kGolden))`. Distinct ids give independent
/// streams from one user seed.
class Rng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t key) : key_(key) {}

  static Rng stream(std::uint64_t seed, std::uint64_t id) {
    return Rng(mix64(seed ^ mix64(id + kGolden)));
  }

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Uses rejection to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller (consumes two outputs, no caching).
  double normal();

  /// Uniform direction on the unit sphere (normalized isotropic Gaussian).
  Vec3 unit_vector();

  std::uint64_t counter() const { return counter_; }
  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream ids used across the library. Keeping them in one place stops two
/// subsystems from silently sharing a stream.
enum class RngStream : std::uint64_t {
  kRayOrigins = 1,
  kRayDirections = 2,
  kSymmetryPairs = 3,
  kSurfaceBias = 4,
  kPyramidNoise = 5,
  kInit = 6,
  kShuffle = 7,
  kPairShuffle = 8,
  kEvaluation = 9,
  kGradcheck = 10,
};

inline Rng make_rng(std::uint64_t seed, RngStream s) {
  return Rng::stream(seed, static_cast<std::uint64_t>(s));
}

}  // namespace ddf
