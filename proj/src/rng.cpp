#include "sparseatt/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace sparseatt {

std::uint64_t SplitMix64::uniform_int(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_int: bound must be >= 1");
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  SplitMix64 a(seed ^ (0xA0761D6478BD642FULL * static_cast<std::uint64_t>(tag)));
  SplitMix64 b(a.next_u64() ^ (0xE7037ED1A0B428DBULL * (index + 1)));
  return b.next_u64();
}

std::vector<std::size_t> sample_distinct(SplitMix64& rng, std::size_t m, std::size_t n) {
  if (m > n) throw std::invalid_argument("sample_distinct: m > n");
  std::vector<std::size_t> picked;
  picked.reserve(m);
  auto contains = [&picked](std::size_t v) {
    for (std::size_t p : picked)
      if (p == v) return true;
    return false;
  };
  for (std::size_t j = n - m; j < n; ++j) {
    std::size_t t = static_cast<std::size_t>(rng.uniform_int(j + 1));
    picked.push_back(contains(t) ? j : t);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace sparseatt
