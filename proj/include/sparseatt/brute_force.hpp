#pragma once

#include <cstddef>

#include "sparseatt/dense_matrix.hpp"
#include "sparseatt/ledger.hpp"
#include "sparseatt/support_set.hpp"

namespace sparseatt {

/// One membership-oracle evaluation: returns <Q_i, K_j> and charges the
/// ledger one oracle call plus d multiply-adds. Indices are range-checked
/// (std::out_of_range).
double row_score_oracle(const DenseMatrix& q, const DenseMatrix& k_mat, std::size_t i,
                        std::size_t j, QueryCostLedger& ledger);

/// Trusted O(n^2 d) support finder: scans every score and keeps j with
/// score >= tau. Charges exactly rows(q) * rows(k) oracle calls.
SupportSets brute_force_support(const DenseMatrix& q, const DenseMatrix& k_mat, double tau,
                                QueryCostLedger& ledger);

}  // namespace sparseatt
