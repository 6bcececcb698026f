#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace levsketch {

/// Row-major dense matrix of doubles.
///
/// The zero-filled constructor never fails; the data constructor rejects
/// size mismatches and non-finite entries so that anything entering the
/// library from outside is known to be finite.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> x, std::span<const double> y);
double norm2_squared(std::span<const double> x);

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);     // A * B
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);  // A^T * B
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);  // A * B^T
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);
std::vector<double> matvec_t(const DenseMatrix& a, std::span<const double> x);

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);

/// Squared Euclidean norm of every row, each accumulated in column order.
std::vector<double> row_norms_squared(const DenseMatrix& a);

/// Leading `cols` columns of `a`.
DenseMatrix left_columns(const DenseMatrix& a, std::size_t cols);
DenseMatrix select_rows(const DenseMatrix& a, std::span<const std::size_t> rows);
DenseMatrix diag(std::span<const double> values);

}  // namespace levsketch
