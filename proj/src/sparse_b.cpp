#include "sparseatt/sparse_b.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sparseatt/goodness.hpp"

namespace sparseatt {

SparseB build_B(const SupportSets& support) {
  support.validate();
  SparseB b;
  b.n = support.n;
  b.correction.n = support.n;
  b.correction.row_indices = support.rows;
  b.correction.row_values.resize(support.rows.size());
  b.row_sums.resize(support.rows.size());

  for (std::size_t i = 0; i < support.rows.size(); ++i) {
    const auto& row_scores = support.scores[i];
    auto& values = b.correction.row_values[i];
    values.reserve(row_scores.size());
    double sum = static_cast<double>(support.n);
    for (std::size_t t = 0; t < row_scores.size(); ++t) {
      double score = row_scores[t];
      if (!(score >= support.tau)) {
        throw std::logic_error("build_B: support row " + std::to_string(i) +
                               " carries a score below tau (upstream contract breach)");
      }
      // Same expression as the dense reference path: exp of the shared dot
      // product. The -1 is exact for score >= 0, so 1 + value recovers the
      // dense entry bitwise.
      double value = std::exp(score) - 1.0;
      values.push_back(value);
      sum += value;
    }
    b.row_sums[i] = sum;
  }
  return b;
}

AttentionOutput sparse_attention(const SparseB& b, const DenseMatrix& v,
                                 QueryCostLedger& ledger) {
  if (v.rows() != b.n) {
    throw std::invalid_argument("sparse_attention: V must have one row per key");
  }
  const std::size_t n = b.n;
  const std::size_t n_rows = b.correction.row_indices.size();
  const std::size_t d = v.cols();

  // Rank-1 part: every row of the all-ones matrix contributes the column
  // sums of V, computed once.
  std::vector<double> col_sums(d, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < d; ++c) col_sums[c] += v(j, c);
  }

  AttentionOutput out{DenseMatrix(n_rows, d), std::vector<double>(n_rows, 0.0)};
  std::uint64_t nnz = 0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    double denom = b.row_sums[i];
    if (!(denom > 0.0)) {
      throw std::domain_error("sparse_attention: non-positive row sum at row " +
                              std::to_string(i));
    }
    out.row_sums[i] = denom;
    const auto& idx = b.correction.row_indices[i];
    const auto& val = b.correction.row_values[i];
    nnz += idx.size();
    for (std::size_t c = 0; c < d; ++c) {
      double acc = col_sums[c];
      for (std::size_t t = 0; t < idx.size(); ++t) acc += val[t] * v(idx[t], c);
      out.matrix(i, c) = acc / denom;
    }
  }

  ledger.dot_product_flops += n * d + nnz * d + n_rows * d;
  return out;
}

double fp_slack(std::size_t n) {
  return 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n);
}

namespace {

// Dense row sums for A and the densified B, computed with the identical
// summation routine so that bitwise-equal matrices yield bitwise-equal sums.
std::vector<double> dense_row_sums(const DenseMatrix& m) {
  std::vector<double> sums(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    auto r = m.row(i);
    for (double x : r) acc += x;
    sums[i] = acc;
  }
  return sums;
}

DenseMatrix densify_B(const SparseB& b) {
  DenseMatrix dense(b.correction.row_indices.size(), b.n);
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    for (std::size_t j = 0; j < b.n; ++j) dense(i, j) = 1.0;
    const auto& idx = b.correction.row_indices[i];
    const auto& val = b.correction.row_values[i];
    for (std::size_t t = 0; t < idx.size(); ++t) {
      dense(i, idx[t]) = 1.0 + val[t];
    }
  }
  return dense;
}

// D(X)^-1 X V with a fixed accumulation order shared by both sides of the
// comparison: for every output entry the j terms are added in ascending
// order, walking V row-wise for locality.
DenseMatrix normalized_product(const DenseMatrix& x, const std::vector<double>& row_sums,
                               const DenseMatrix& v) {
  DenseMatrix out(x.rows(), v.cols());
  std::vector<double> acc(v.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double w = x(i, j);
      auto v_row = v.row(j);
      for (std::size_t c = 0; c < v.cols(); ++c) acc[c] += w * v_row[c];
    }
    for (std::size_t c = 0; c < v.cols(); ++c) out(i, c) = acc[c] / row_sums[i];
  }
  return out;
}

}  // namespace

CertificationReport certify_instance(const DenseMatrix& q, const DenseMatrix& k_mat,
                                     const DenseMatrix& v, const SparseB& b, double tau,
                                     std::size_t k, double eta) {
  GoodnessReport goodness = check_goodness(q, k_mat, tau, k, eta);
  if (!goodness.is_good) {
    std::string reason;
    if (goodness.max_row_support > k) {
      reason = "a row support exceeds k (max " + std::to_string(goodness.max_row_support) + ")";
    } else if (goodness.max_off_support_score > 0.0) {
      reason = "an off-support score is positive (max " +
               std::to_string(goodness.max_off_support_score) + ")";
    } else {
      reason = "an off-support score falls below -eta (min " +
               std::to_string(goodness.min_off_support_score) + ")";
    }
    throw std::domain_error("certify_instance: goodness violated: " + reason);
  }

  const DenseMatrix a = exact_dense_A(q, k_mat);
  const DenseMatrix bd = densify_B(b);
  if (a.rows() != bd.rows() || a.cols() != bd.cols()) {
    throw std::invalid_argument("certify_instance: A and B shapes disagree");
  }
  const std::size_t n = a.cols();
  const std::vector<double> da = dense_row_sums(a);
  const std::vector<double> db = dense_row_sums(bd);

  CertificationReport report;
  ErrorReport& err = report.error;
  err.eta = eta;
  err.bound_no_v = 3.0 * eta;
  err.bound_with_v = 3.0 * eta * eta;

  PerturbationReport& parts = report.perturbation;
  parts.n = n;
  parts.eta = eta;
  parts.off_support_entry_bound = 2.0 * eta;
  parts.row_sum_gap_bound = 2.0 * static_cast<double>(n) * eta;
  parts.on_support_entries_identical = true;
  parts.row_sum_gap_within_bound = true;
  parts.row_sum_floor_within_bound = true;
  parts.min_row_sum_minus_floor = std::numeric_limits<double>::infinity();
  parts.min_floor_minus_2n = std::numeric_limits<double>::infinity();

  const double exp_tau = std::exp(tau);
  const double slack = fp_slack(n);

  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto& idx = b.correction.row_indices[i];
    std::size_t next = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double gap = std::fabs(a(i, j) - bd(i, j));
      if (gap > err.entry_err) err.entry_err = gap;
      bool on_support = next < idx.size() && idx[next] == j;
      if (on_support) {
        if (a(i, j) != bd(i, j)) parts.on_support_entries_identical = false;
        ++next;
      } else {
        if (gap > parts.max_off_support_entry_gap) parts.max_off_support_entry_gap = gap;
      }
      double weight_gap = std::fabs(a(i, j) / da[i] - bd(i, j) / db[i]);
      if (weight_gap > err.lhs_no_v) err.lhs_no_v = weight_gap;
    }

    double sum_gap = std::fabs(da[i] - db[i]);
    if (sum_gap > parts.max_row_sum_gap) parts.max_row_sum_gap = sum_gap;
    if (sum_gap > parts.row_sum_gap_bound + slack * da[i]) {
      parts.row_sum_gap_within_bound = false;
    }
    double rel_gap = sum_gap / da[i];
    if (rel_gap > parts.max_row_sum_rel_gap) parts.max_row_sum_rel_gap = rel_gap;
    if (rel_gap > err.diag_rel_err) err.diag_rel_err = rel_gap;

    double floor = static_cast<double>(idx.size()) * exp_tau;
    parts.min_row_sum_minus_floor = std::min(parts.min_row_sum_minus_floor, da[i] - floor);
    parts.min_floor_minus_2n =
        std::min(parts.min_floor_minus_2n, floor - 2.0 * static_cast<double>(n));
    if (da[i] - floor < -slack * std::max(1.0, da[i]) ||
        floor - 2.0 * static_cast<double>(n) < -slack * std::max(1.0, floor)) {
      parts.row_sum_floor_within_bound = false;
    }
  }

  parts.off_support_within_bound =
      parts.max_off_support_entry_gap <= parts.off_support_entry_bound + slack;
  parts.row_sum_rel_within_bound = parts.max_row_sum_rel_gap <= eta + slack;

  const DenseMatrix av = normalized_product(a, da, v);
  const DenseMatrix bv = normalized_product(bd, db, v);
  err.lhs_with_v = entrywise_inf_norm_diff(av, bv);

  return report;
}

ErrorReport error_report(const DenseMatrix& q, const DenseMatrix& k_mat, const DenseMatrix& v,
                         const SparseB& b, double tau, std::size_t k, double eta) {
  return certify_instance(q, k_mat, v, b, tau, k, eta).error;
}

}  // namespace sparseatt
