#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "sparseatt/dense_matrix.hpp"
#include "sparseatt/support_set.hpp"

namespace sparseatt {

enum class InstanceMode { kGramExact, kRandomEmbed };

std::string mode_name(InstanceMode mode);
InstanceMode mode_from_name(const std::string& name);  // throws std::invalid_argument

/// Parameters of a generated threshold-sparse problem. gram_exact places the
/// score matrix directly (Q := S, K := I, d := n) so every condition holds
/// bit-exactly; random_embed plants marker directions in a low-dimensional
/// embedding for realistic d << n benchmarking. v_inf_cap < 0 means
/// "default to eta".
struct InstanceSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t k = 0;
  double tau = 0.0;
  double eta = 0.0;
  std::uint64_t seed = 0;
  InstanceMode mode = InstanceMode::kGramExact;
  double v_inf_cap = -1.0;

  double effective_v_cap() const { return v_inf_cap < 0.0 ? eta : v_inf_cap; }

  /// Enforces n >= 2, 1 <= k <= n, eta >= 0, tau >= 2 ln n, and d >= 2 for
  /// random_embed. Throws std::invalid_argument naming the violation.
  void validate() const;
};

struct Instance {
  InstanceSpec spec;  // resolved: d and v_inf_cap are the values actually used
  DenseMatrix q;
  DenseMatrix k_mat;
  DenseMatrix v;
  SupportSets truth;
};

/// Deterministically generates an instance from the spec and post-validates
/// it with the goodness checker. gram_exact must pass; random_embed retries
/// with derived sub-seeds up to 16 times and then rejects with diagnostics
/// (std::runtime_error).
Instance generate(const InstanceSpec& spec);

/// Self-describing binary container: magic, JSON header (spec + format
/// version), little-endian 64-bit-real blocks for Q, K, V, then the truth
/// supports as varint-delta index lists with raw score blocks. Round-trips
/// are bit-exact.
void write_instance(const std::string& path, const Instance& instance);
Instance read_instance(const std::string& path);

}  // namespace sparseatt
