#pragma once

#include <cstddef>

#include "sparseatt/dense_matrix.hpp"

namespace sparseatt {

/// Result of the trusted dense scan over QK^T. A score is "on support" when
/// it clears tau and "off support" otherwise. min/max fields use the empty
/// conventions +inf / -inf so the conditions below hold vacuously for empty
/// sets.
///
/// is_good  <=>  max_row_support <= k
///           and min_on_support_score >= tau
///           and off-support scores all within [-eta, 0].
struct GoodnessReport {
  bool is_good = false;
  std::size_t max_row_support = 0;
  double min_on_support_score = 0.0;
  double max_off_support_score = 0.0;
  double min_off_support_score = 0.0;
};

/// Computes the report from the full score matrix, streamed row by row (the
/// n x n matrix is never materialized). Requires tau > 0 and equal column
/// counts; throws std::invalid_argument otherwise.
GoodnessReport check_goodness(const DenseMatrix& q, const DenseMatrix& k_mat, double tau,
                              std::size_t k, double eta);

}  // namespace sparseatt
