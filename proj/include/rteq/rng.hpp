#pragma once

#include <cmath>
#include <cstdint>

namespace rteq {

/// Deterministic splitmix64 stream. Used everywhere instead of <random>
/// engines/distributions, whose output sequences are implementation-defined;
/// byte-identical reproduction across toolchains needs a pinned generator.
///
/// Gaussian draws use Box-Muller on the raw uniform stream, one pair cached,
/// so the sequence for a given seed is fixed for good.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal N(0, 1).
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // u1 in (0,1] so the log is finite.
    double u1 = 1.0 - next_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  /// Decorrelated child stream, e.g. one per sample or per tree. The
  /// derivation is a pure function of (parent seed, index), so generation
  /// order and thread scheduling cannot affect the draws.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    Rng mixer(seed ^ (0x6A09E667F3BCC909ULL + index * 0xD1B54A32D192ED03ULL));
    std::uint64_t s = mixer.next_u64();
    Rng child(s ^ index);
    child.next_u64();
    return child;
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace rteq
