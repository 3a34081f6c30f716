#pragma once

#include <cstddef>
#include <vector>

namespace sparseatt {

/// Per-row support sets S_i = { j : score(i, j) >= tau } with the raw scores
/// stored alongside. Index lists are sorted and duplicate-free; scores[i][t]
/// is the score of rows[i][t]. tau records the threshold the sets were built
/// against so downstream consumers can re-validate the contract.
struct SupportSets {
  std::size_t n = 0;
  double tau = 0.0;
  std::vector<std::vector<std::size_t>> rows;
  std::vector<std::vector<double>> scores;

  std::size_t max_row_size() const;
  std::size_t total_size() const;

  /// Checks the structural invariants (parallel shapes, sorted duplicate-free
  /// indices inside [0, n)). Throws std::logic_error on violation.
  void validate() const;

  bool operator==(const SupportSets&) const = default;
};

/// Number of rows whose (indices, scores) differ between the two set
/// families. Shapes must agree on n.
std::size_t mismatched_rows(const SupportSets& a, const SupportSets& b);

}  // namespace sparseatt
