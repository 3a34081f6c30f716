#include "sparseatt/dense_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sparseatt {

namespace {

void require_valid_shape(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("DenseMatrix: rows and cols must be >= 1");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  require_valid_shape(rows, cols);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_valid_shape(rows, cols);
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("DenseMatrix: data length must equal rows*cols");
  }
  for (std::size_t idx = 0; idx < data_.size(); ++idx) {
    if (!std::isfinite(data_[idx])) {
      throw std::invalid_argument("DenseMatrix: non-finite entry at flat index " +
                                  std::to_string(idx));
    }
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) acc += a[l] * b[l];
  return acc;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b_transposed) {
  if (a.cols() != b_transposed.cols()) {
    throw std::invalid_argument("matmul: operands must share the row dimension d (got " +
                                std::to_string(a.cols()) + " and " +
                                std::to_string(b_transposed.cols()) + ")");
  }
  DenseMatrix result(a.rows(), b_transposed.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto lhs = a.row(i);
    for (std::size_t j = 0; j < b_transposed.rows(); ++j) {
      result(i, j) = dot(lhs, b_transposed.row(j));
    }
  }
  return result;
}

double entrywise_inf_norm_diff(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("entrywise_inf_norm_diff: shape mismatch");
  }
  double worst = 0.0;
  const auto& xd = x.data();
  const auto& yd = y.data();
  for (std::size_t idx = 0; idx < xd.size(); ++idx) {
    double gap = std::fabs(xd[idx] - yd[idx]);
    if (gap > worst) worst = gap;
  }
  return worst;
}

}  // namespace sparseatt
