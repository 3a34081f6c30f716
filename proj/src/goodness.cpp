#include "sparseatt/goodness.hpp"

#include <limits>
#include <stdexcept>

namespace sparseatt {

GoodnessReport check_goodness(const DenseMatrix& q, const DenseMatrix& k_mat, double tau,
                              std::size_t k, double eta) {
  if (q.cols() != k_mat.cols()) {
    throw std::invalid_argument("check_goodness: Q and K must share the column dimension");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("check_goodness: tau must be positive");
  }

  GoodnessReport report;
  report.min_on_support_score = std::numeric_limits<double>::infinity();
  report.max_off_support_score = -std::numeric_limits<double>::infinity();
  report.min_off_support_score = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < q.rows(); ++i) {
    auto lhs = q.row(i);
    std::size_t row_support = 0;
    for (std::size_t j = 0; j < k_mat.rows(); ++j) {
      double score = dot(lhs, k_mat.row(j));
      if (score >= tau) {
        ++row_support;
        if (score < report.min_on_support_score) report.min_on_support_score = score;
      } else {
        if (score > report.max_off_support_score) report.max_off_support_score = score;
        if (score < report.min_off_support_score) report.min_off_support_score = score;
      }
    }
    if (row_support > report.max_row_support) report.max_row_support = row_support;
  }

  bool supports_bounded = report.max_row_support <= k;
  bool on_ok = report.min_on_support_score >= tau;  // vacuous (+inf) when empty
  bool off_ok = report.max_off_support_score <= 0.0 && report.min_off_support_score >= -eta;
  report.is_good = supports_bounded && on_ok && off_ok;
  return report;
}

}  // namespace sparseatt
