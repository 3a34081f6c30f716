#pragma once

#include <cstddef>
#include <vector>

#include "sparseatt/dense_matrix.hpp"
#include "sparseatt/ledger.hpp"
#include "sparseatt/reference_attention.hpp"
#include "sparseatt/support_set.hpp"

namespace sparseatt {

/// Row-sparse correction C = B - 11^T. The surrogate matrix B equals
/// exp(score) on each row's support and 1 elsewhere, so C holds
/// exp(score) - 1 on the support pattern and is zero off it.
struct SparseCorrection {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> row_indices;
  std::vector<std::vector<double>> row_values;
};

/// B in rank-1 + sparse form, with fast-path row sums
/// row_sums[i] = n + sum_j C_ij (the diagonal of D(B)).
struct SparseB {
  std::size_t n = 0;
  SparseCorrection correction;
  std::vector<double> row_sums;
};

/// Builds B from support sets carrying raw scores. On-support values use the
/// same expression as the dense reference (exp of the shared dot product),
/// which keeps them bitwise equal to the corresponding A entries. A stored
/// score below support.tau is a contract breach upstream and is rejected
/// with std::logic_error.
SparseB build_B(const SupportSets& support);

/// D(B)^-1 B V through the all-ones / sparse split: the rank-1 part
/// contributes the column sums of V to every row, the correction contributes
/// C_{i,*} V. Charges nd + nnz*d + nd flops. Guards row_sums > 0
/// (std::domain_error; cannot trigger for a well-formed SparseB).
AttentionOutput sparse_attention(const SparseB& b, const DenseMatrix& v,
                                 QueryCostLedger& ledger);

/// Measured error quantities of the surrogate against dense ground truth,
/// with the bounds they are certified against.
struct ErrorReport {
  double eta = 0.0;
  double lhs_no_v = 0.0;      // || D(A)^-1 A - D(B)^-1 B ||_inf
  double lhs_with_v = 0.0;    // || D(A)^-1 A V - D(B)^-1 B V ||_inf
  double bound_no_v = 0.0;    // 3 * eta
  double bound_with_v = 0.0;  // 3 * eta^2
  double diag_rel_err = 0.0;  // max_i |D(A)_ii - D(B)_ii| / D(A)_ii
  double entry_err = 0.0;     // max_ij |A_ij - B_ij|
};

/// Entry- and row-level perturbation checks. Measured extremes are reported
/// verbatim; the *_within_bound flags are evaluated per row against the
/// stated bound plus a floating-point slack of 64 * eps * n (scaled by the
/// row sum for row-sum quantities). on_support_entries_identical demands
/// bitwise equality with no slack at all.
struct PerturbationReport {
  std::size_t n = 0;
  double eta = 0.0;

  double max_off_support_entry_gap = 0.0;  // max off-support |A_ij - B_ij|
  double off_support_entry_bound = 0.0;    // 2 * eta
  bool off_support_within_bound = false;

  bool on_support_entries_identical = false;

  double max_row_sum_gap = 0.0;    // max_i |(A1)_i - (B1)_i|
  double row_sum_gap_bound = 0.0;  // 2 * n * eta
  bool row_sum_gap_within_bound = false;

  double min_row_sum_minus_floor = 0.0;  // min_i ((A1)_i - |S_i| exp(tau))
  double min_floor_minus_2n = 0.0;       // min_i (|S_i| exp(tau) - 2n)
  bool row_sum_floor_within_bound = false;

  double max_row_sum_rel_gap = 0.0;  // max_i gap_i / (A1)_i, bound eta
  bool row_sum_rel_within_bound = false;

  bool all_ok() const {
    return off_support_within_bound && on_support_entries_identical &&
           row_sum_gap_within_bound && row_sum_floor_within_bound && row_sum_rel_within_bound;
  }
};

/// Everything the certification harness derives from one dense
/// materialization of A and B.
struct CertificationReport {
  ErrorReport error;
  PerturbationReport perturbation;
};

/// Additive floating-point slack used by the certification comparisons.
double fp_slack(std::size_t n);

/// Materializes dense A and dense B, computes both row-sum families with the
/// same summation routine, and fills every measured field. Requires the
/// instance to pass the goodness check for (tau, k, eta); the failing
/// condition is named in the thrown std::domain_error otherwise. Dense
/// materialization is guarded by kDenseGuardMaxRows.
CertificationReport certify_instance(const DenseMatrix& q, const DenseMatrix& k_mat,
                                     const DenseMatrix& v, const SparseB& b, double tau,
                                     std::size_t k, double eta);

/// The error fields alone; see certify_instance for the contract.
ErrorReport error_report(const DenseMatrix& q, const DenseMatrix& k_mat, const DenseMatrix& v,
                         const SparseB& b, double tau, std::size_t k, double eta);

}  // namespace sparseatt
