#pragma once

#include <cstdint>
#include <limits>

namespace robust {

/// Named sub-streams. Each entity of a synthetic instance draws from its own
/// stream so that e.g. changing k* leaves the design draw untouched.
enum class Stream : std::uint64_t {
  WStar = 1,
  Design = 2,
  Noise = 3,
  CorruptionLocations = 4,
  CorruptionValues = 5,
  SeriesInit = 6,
  Moment = 7,
  SupportSampling = 8,
  Misc = 9,
};

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * @brief SplitMix64 run in counter mode.
 *
 * Output i of stream (seed, stream, substream) is mix(key + (i + 1) * gamma) with
 * key = mix(seed ^ mix(stream * gamma ^ mix(substream))). Any output is addressable
 * without generating its predecessors, which is what makes per-chunk Monte-Carlo
 * streams and per-cell experiment seeds independent of scheduling.
 *
 * Satisfies UniformRandomBitGenerator, so it plugs into <random> distributions.
 */
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t substream = 0)
      : key_(splitmix64_mix(seed ^ splitmix64_mix(static_cast<std::uint64_t>(stream) * kGamma ^
                                                  splitmix64_mix(substream)))) {}

  result_type operator()() { return splitmix64_mix(key_ + (++counter_) * kGamma); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace robust
