#pragma once

#include <cstdint>
#include <string_view>

#include "fdrdet/normal.hpp"

namespace fdrdet {

/// Counter-style pseudo-random stream in the SplittableRandom design:
/// each stream owns a (state, increment) pair derived by hashing a
/// (master seed, stream index, purpose tag) triple, so identical triples
/// reproduce identical draws and distinct triples give statistically
/// independent streams. Trial-level Monte Carlo derives one stream per
/// trial, which makes results independent of the worker count.
class Rng {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (const char ch : tag) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
    return h;
  }

  static Rng substream(std::uint64_t seed, std::uint64_t index, std::string_view tag) {
    const std::uint64_t key = mix64(mix64(mix64(seed) ^ index) ^ hash_tag(tag));
    Rng rng;
    rng.state_ = mix64(key);
    rng.increment_ = mix64(key + kGolden) | 1ULL;
    return rng;
  }

  std::uint64_t next_u64() {
    state_ += increment_;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in (0,1), always an integer multiple of 2^-53 so that
  /// the Byzantine flip u -> 1-u is exact in double precision.
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
      if (u != 0.0) return u;
    }
  }

  /// Standard normal draw via the inverse-cdf transform.
  double normal() { return gauss_quantile(uniform()); }

  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x < limit) return x % n;
    }
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t increment_ = kGolden | 1ULL;
};

}  // namespace fdrdet
