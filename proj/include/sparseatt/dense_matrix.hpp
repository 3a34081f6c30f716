#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sparseatt {

/// Row-major dense matrix of 64-bit reals. Shape is immutable and entries
/// are validated finite when constructed from user data.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);  // zero-filled
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_.data() + i * cols_, cols_);
  }
  std::span<double> row(std::size_t i) {
    return std::span<double>(data_.data() + i * cols_, cols_);
  }

  const std::vector<double>& data() const { return data_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Left-to-right dot product with no reassociation. Every score in the
/// project flows through this single accumulation order so that
/// independently produced scores for the same (i, j) pair are bitwise equal.
double dot(std::span<const double> a, std::span<const double> b);

/// result[i][j] = <a row i, b row j>. Both arguments store d-dimensional
/// rows; the result has shape rows(a) x rows(b). Throws std::invalid_argument
/// on a column-count mismatch.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b_transposed);

/// max_{i,j} |x_ij - y_ij| for same-shape matrices (entrywise infinity norm
/// of the difference). Throws std::invalid_argument on a shape mismatch.
double entrywise_inf_norm_diff(const DenseMatrix& x, const DenseMatrix& y);

}  // namespace sparseatt
