#include "sparseatt/reference_attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sparseatt/parallel.hpp"

namespace sparseatt {

namespace {

void require_attention_shapes(const DenseMatrix& q, const DenseMatrix& k_mat,
                              const DenseMatrix& v) {
  if (q.cols() != k_mat.cols()) {
    throw std::invalid_argument("exact_attention: Q and K must share the column dimension");
  }
  if (v.rows() != k_mat.rows()) {
    throw std::invalid_argument("exact_attention: V must have one row per key");
  }
}

[[noreturn]] void throw_overflow(std::size_t i, std::size_t j) {
  throw std::range_error("exact_attention: exp overflow at (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
}

}  // namespace

AttentionOutput exact_attention(const DenseMatrix& q, const DenseMatrix& k_mat,
                                const DenseMatrix& v, QueryCostLedger* ledger) {
  require_attention_shapes(q, k_mat, v);
  const std::size_t n_out = q.rows();
  const std::size_t n = k_mat.rows();
  const std::size_t d_out = v.cols();

  AttentionOutput out{DenseMatrix(n_out, d_out), std::vector<double>(n_out, 0.0)};

  // Rows are independent; each worker owns a contiguous slice of the output.
  // The weighted-value accumulation walks V row-wise; per output entry the
  // terms still add in ascending key order.
  parallel_for(n_out, [&](std::size_t begin, std::size_t end) {
    std::vector<double> weights(n);
    std::vector<double> acc(d_out);
    for (std::size_t i = begin; i < end; ++i) {
      auto lhs = q.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        double e = std::exp(dot(lhs, k_mat.row(j)));
        if (!std::isfinite(e)) throw_overflow(i, j);
        weights[j] = e;
      }
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += weights[j];
      if (!std::isfinite(sum)) throw_overflow(i, n - 1);
      out.row_sums[i] = sum;
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        double w = weights[j];
        auto v_row = v.row(j);
        for (std::size_t c = 0; c < d_out; ++c) acc[c] += w * v_row[c];
      }
      for (std::size_t c = 0; c < d_out; ++c) out.matrix(i, c) = acc[c] / sum;
    }
  });

  if (ledger != nullptr) {
    // scores (n*d) + exp (n) + row sum (n) per output row, then the
    // weighted-value accumulation and the final normalization.
    ledger->dot_product_flops +=
        n_out * (n * q.cols() + 2 * n) + n_out * d_out * n + n_out * d_out;
  }
  return out;
}

DenseMatrix exact_dense_A(const DenseMatrix& q, const DenseMatrix& k_mat) {
  if (q.cols() != k_mat.cols()) {
    throw std::invalid_argument("exact_dense_A: Q and K must share the column dimension");
  }
  if (q.rows() > kDenseGuardMaxRows || k_mat.rows() > kDenseGuardMaxRows) {
    throw std::length_error("exact_dense_A: refusing to materialize more than 2^14 rows");
  }
  DenseMatrix a(q.rows(), k_mat.rows());
  for (std::size_t i = 0; i < q.rows(); ++i) {
    auto lhs = q.row(i);
    for (std::size_t j = 0; j < k_mat.rows(); ++j) {
      double e = std::exp(dot(lhs, k_mat.row(j)));
      if (!std::isfinite(e)) throw_overflow(i, j);
      a(i, j) = e;
    }
  }
  return a;
}

}  // namespace sparseatt
