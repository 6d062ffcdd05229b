#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace lgqs {

/// SplitMix64: a counter (state advanced by a fixed odd increment) passed through
/// a bijective mixer. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(state_ += 0x9E3779B97F4A7C15ULL); }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of the independent stream identified by (base seed, trajectory, channel).
constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t trajectory, std::uint64_t channel) {
  std::uint64_t h = SplitMix64::mix(base ^ 0x5DEECE66DULL);
  h = SplitMix64::mix(h ^ (trajectory * 0xD1B54A32D192ED03ULL));
  h = SplitMix64::mix(h ^ (channel * 0x8CB92BA72F3D8DD7ULL));
  return h;
}

/// Wiener increments dW ~ Normal(0, dt) from one stream.
class WienerStream {
 public:
  WienerStream(std::uint64_t base, std::uint64_t trajectory, std::uint64_t channel, double dt)
      : engine_(stream_seed(base, trajectory, channel)), normal_(0.0, std::sqrt(dt)) {}

  double operator()() { return normal_(engine_); }

 private:
  SplitMix64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace lgqs
