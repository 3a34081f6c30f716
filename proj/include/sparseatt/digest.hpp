#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "sparseatt/reference_attention.hpp"

namespace sparseatt {

/// FNV-1a over raw bytes; the project-wide output checksum primitive.
std::uint64_t fnv1a64(const void* data, std::size_t size_bytes);
std::uint64_t fnv1a64(const void* data, std::size_t size_bytes, std::uint64_t state);

std::string to_hex(std::uint64_t value);

/// Checksum of an attention output: matrix bytes then row-sum bytes.
std::string output_checksum(const AttentionOutput& out);

}  // namespace sparseatt
