#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace badac {

// Counter-based pseudo-random stream ("badac-sm64-v1").
//
// The algorithm is part of the external reproducibility contract: datasets
// are regenerable from (seed, stream keys) alone, on any platform.
//
//   output[k]       = mix64(base + (k + 1) * GAMMA)       (splitmix64)
//   substream(key)  = stream with base' = mix64(base ^ mix64(GAMMA * (key + 1)))
//   unit double     = ((output >> 11) + 1) * 2^-53        in (0, 1]
//   gaussian        = sqrt(-2 ln u1) * cos(2 pi u2)       (Box-Muller, cosine branch)
//
// Substreams are independent for distinct keys, so per-instance generation
// order never affects other instances.
class CounterRng {
 public:
  static constexpr const char* kGeneratorName = "badac-sm64-v1";

  explicit CounterRng(std::uint64_t seed) : base_(seed) {}

  std::uint64_t next_u64() { return mix64(base_ + (++counter_) * kGamma); }

  // Uniform on (0, 1]; never returns 0, so log(u) is always finite.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal draw. Consumes exactly two uniforms.
  double next_gaussian() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  CounterRng substream(std::uint64_t key) const {
    return CounterRng(mix64(base_ ^ mix64(kGamma * (key + 1))));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t base_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace badac
