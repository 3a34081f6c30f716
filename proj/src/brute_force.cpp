#include "sparseatt/brute_force.hpp"

#include <stdexcept>
#include <string>

#include "sparseatt/parallel.hpp"

namespace sparseatt {

double row_score_oracle(const DenseMatrix& q, const DenseMatrix& k_mat, std::size_t i,
                        std::size_t j, QueryCostLedger& ledger) {
  if (i >= q.rows() || j >= k_mat.rows()) {
    throw std::out_of_range("row_score_oracle: index out of range (i=" + std::to_string(i) +
                            ", j=" + std::to_string(j) + ")");
  }
  if (q.cols() != k_mat.cols()) {
    throw std::invalid_argument("row_score_oracle: Q and K must share the column dimension");
  }
  ledger.oracle_calls += 1;
  ledger.dot_product_flops += q.cols();
  return dot(q.row(i), k_mat.row(j));
}

SupportSets brute_force_support(const DenseMatrix& q, const DenseMatrix& k_mat, double tau,
                                QueryCostLedger& ledger) {
  if (q.cols() != k_mat.cols()) {
    throw std::invalid_argument("brute_force_support: Q and K must share the column dimension");
  }
  const std::size_t n_rows = q.rows();
  const std::size_t n = k_mat.rows();
  const std::size_t d = q.cols();

  SupportSets support;
  support.n = n;
  support.tau = tau;
  support.rows.resize(n_rows);
  support.scores.resize(n_rows);

  // Each row owns a sub-ledger; the totals are a fixed function of the
  // shapes, so the merged ledger is identical for any thread count.
  std::vector<QueryCostLedger> row_ledgers(n_rows);
  parallel_for(n_rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto lhs = q.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        double score = dot(lhs, k_mat.row(j));
        row_ledgers[i].oracle_calls += 1;
        row_ledgers[i].dot_product_flops += d;
        if (score >= tau) {
          support.rows[i].push_back(j);
          support.scores[i].push_back(score);
        }
      }
    }
  });
  for (const auto& rl : row_ledgers) ledger += rl;
  return support;
}

}  // namespace sparseatt
