#pragma once

#include <cstdint>
#include <utility>

namespace popcomp {

// Counter-based splittable generator: output k of stream (seed, stream) is
// mix64(key(seed, stream) + k * GAMMA), so a stream never carries hidden
// state beyond its draw counter. Replications use substream(seed, r) and can
// run concurrently; results merge deterministically in r order.
class SplitRng {
 public:
  static constexpr const char* kName = "splitmix64-ctr/v1";
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(derive_key(seed, stream)) {}

  static SplitRng substream(std::uint64_t seed, std::uint64_t stream) {
    return SplitRng(seed, stream);
  }

  std::uint64_t next_u64() {
    counter_ += kGamma;
    return mix64(key_ + counter_);
  }

  // Unbiased integer in [0, bound); multiply-shift with rejection.
  std::uint64_t bounded(std::uint64_t bound) {
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // 53-bit uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniformly random ordered pair of distinct indices in [0, n); n >= 2.
  std::pair<std::uint32_t, std::uint32_t> ordered_pair(std::uint64_t n) {
    const std::uint64_t i = bounded(n);
    std::uint64_t j = bounded(n - 1);
    j += (j >= i) ? 1 : 0;
    return {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
  }

  std::uint64_t draws() const { return counter_ / kGamma; }

 private:
  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed ^ 0x5851F42D4C957F2DULL) + stream * kGamma);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace popcomp
