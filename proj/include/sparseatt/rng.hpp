#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sparseatt {

// SplitMix64 (Steele/Lea/Vigna). The whole state is one 64-bit word and the
// output function is a fixed integer mix, so sequences reproduce bit for bit
// on every platform. Constants below are the published ones.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1): top 53 bits scaled by 2^-53.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi). A degenerate range (lo == hi) returns lo exactly.
  double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

  // Unbiased integer in [0, bound), bound >= 1. Lemire multiply-shift.
  std::uint64_t uniform_int(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

// Purpose tags keep logically independent draws (scores, support positions,
// value entries, search randomness, ...) on disjoint streams even when they
// share the same (seed, row) pair.
enum class StreamTag : std::uint64_t {
  kSupportPositions = 1,
  kOnSupportScores = 2,
  kOffSupportScores = 3,
  kValueMatrix = 4,
  kGroverSearch = 5,
  kQueryMarkers = 6,
  kKeyNoise = 7,
  kGroupLayout = 8,
  kBench = 9,
  kRetry = 10,
};

// Derives a decorrelated child seed from (seed, tag, index) by chaining
// SplitMix64 steps. Used for per-row streams and per-cell bench seeds.
std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index);

inline SplitMix64 stream_for(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  return SplitMix64(derive_seed(seed, tag, index));
}

// Floyd's sampling of m distinct values from [0, n), returned sorted.
std::vector<std::size_t> sample_distinct(SplitMix64& rng, std::size_t m, std::size_t n);

}  // namespace sparseatt
