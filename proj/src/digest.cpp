#include "sparseatt/digest.hpp"

namespace sparseatt {

namespace {
constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;
}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size_bytes, std::uint64_t state) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size_bytes; ++i) {
    state ^= bytes[i];
    state *= kFnvPrime;
  }
  return state;
}

std::uint64_t fnv1a64(const void* data, std::size_t size_bytes) {
  return fnv1a64(data, size_bytes, kFnvOffset);
}

std::string to_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string output_checksum(const AttentionOutput& out) {
  std::uint64_t state = kFnvOffset;
  state = fnv1a64(out.matrix.data().data(), out.matrix.data().size() * sizeof(double), state);
  state = fnv1a64(out.row_sums.data(), out.row_sums.size() * sizeof(double), state);
  return to_hex(state);
}

}  // namespace sparseatt
