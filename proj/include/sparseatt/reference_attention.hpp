#pragma once

#include <cstddef>
#include <vector>

#include "sparseatt/dense_matrix.hpp"
#include "sparseatt/ledger.hpp"

namespace sparseatt {

/// Output of an attention computation together with the row sums of the
/// score-exponential matrix (the diagonal of D), kept for harness use.
struct AttentionOutput {
  DenseMatrix matrix;            // rows(q) x cols(v)
  std::vector<double> row_sums;  // one positive entry per output row
};

/// Largest row count for which an n x n matrix may be materialized by the
/// dense harness paths.
inline constexpr std::size_t kDenseGuardMaxRows = std::size_t{1} << 14;

/// Ground-truth attention: A = exp(QK^T) entrywise, D = diag(A 1), output
/// D^-1 A V. Rows are streamed, so memory stays O(n + output). A non-finite
/// exponential is rejected with std::range_error naming the offending (i, j).
/// When a ledger is supplied it is charged the dense multiply-add work.
AttentionOutput exact_attention(const DenseMatrix& q, const DenseMatrix& k_mat,
                                const DenseMatrix& v, QueryCostLedger* ledger = nullptr);

/// Dense A = exp(QK^T) for the error harness. Refuses to materialize
/// matrices beyond kDenseGuardMaxRows rows on either side
/// (std::length_error).
DenseMatrix exact_dense_A(const DenseMatrix& q, const DenseMatrix& k_mat);

}  // namespace sparseatt
