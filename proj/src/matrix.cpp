#include "levsketch/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levsketch/error.hpp"
#include "levsketch/parallel.hpp"

namespace levsketch {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_, ErrorCode::DimensionMismatch,
          "data length " + std::to_string(data_.size()) + " != " + std::to_string(rows_) + "x" +
              std::to_string(cols_));
  require(all_finite(), ErrorCode::NonFiniteEntry, "matrix contains NaN or Inf");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    require(row.size() == c, ErrorCode::DimensionMismatch, "ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2_squared(std::span<const double> x) { return dot(x, x); }

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), ErrorCode::DimensionMismatch, "matmul inner dimensions");
  DenseMatrix c(a.rows(), b.cols());
  const std::size_t inner = a.cols();
  const std::size_t m = b.cols();
  parallel_for(a.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* ci = c.row(i).data();
      const double* ai = a.row(i).data();
      for (std::size_t k = 0; k < inner; ++k) {
        const double aik = ai[k];
        if (aik == 0.0) continue;
        const double* bk = b.row(k).data();
        for (std::size_t j = 0; j < m; ++j) ci[j] += aik * bk[j];
      }
    }
  });
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), ErrorCode::DimensionMismatch, "matmul_tn row counts");
  // Accumulate over the shared row index in ascending order for every output
  // entry, which keeps the result independent of the worker split.
  DenseMatrix c(a.cols(), b.cols());
  const std::size_t m = b.cols();
  parallel_for(a.cols(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = 0; k < a.rows(); ++k) {
      const double* ak = a.row(k).data();
      const double* bk = b.row(k).data();
      for (std::size_t i = begin; i < end; ++i) {
        const double aki = ak[i];
        if (aki == 0.0) continue;
        double* ci = c.row(i).data();
        for (std::size_t j = 0; j < m; ++j) ci[j] += aki * bk[j];
      }
    }
  }, 8);
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), ErrorCode::DimensionMismatch, "matmul_nt column counts");
  DenseMatrix c(a.rows(), b.rows());
  parallel_for(a.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
  });
  return c;
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), ErrorCode::DimensionMismatch, "matvec");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

std::vector<double> matvec_t(const DenseMatrix& a, std::span<const double> x) {
  require(a.rows() == x.size(), ErrorCode::DimensionMismatch, "matvec_t");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ai = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += ai[j] * x[i];
  }
  return y;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch, "subtract");
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
  return c;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch, "add");
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] + b.data()[i];
  return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = s * a.data()[i];
  return c;
}

double frobenius_norm(const DenseMatrix& a) {
  // Scaled accumulation so huge/tiny entries neither overflow nor underflow.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : a.data()) {
    if (v == 0.0) continue;
    const double av = std::abs(v);
    if (scale < av) {
      ssq = 1.0 + ssq * (scale / av) * (scale / av);
      scale = av;
    } else {
      ssq += (av / scale) * (av / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> row_norms_squared(const DenseMatrix& a) {
  std::vector<double> out(a.rows());
  parallel_for(a.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = norm2_squared(a.row(i));
  }, 1024);
  return out;
}

DenseMatrix left_columns(const DenseMatrix& a, std::size_t cols) {
  require(cols <= a.cols(), ErrorCode::DimensionMismatch, "left_columns");
  DenseMatrix out(a.rows(), cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    std::copy_n(a.row(i).begin(), cols, out.row(i).begin());
  return out;
}

DenseMatrix select_rows(const DenseMatrix& a, std::span<const std::size_t> rows) {
  DenseMatrix out(rows.size(), a.cols());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    require(rows[t] < a.rows(), ErrorCode::DimensionMismatch, "select_rows index");
    std::copy(a.row(rows[t]).begin(), a.row(rows[t]).end(), out.row(t).begin());
  }
  return out;
}

DenseMatrix diag(std::span<const double> values) {
  DenseMatrix d(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) d(i, i) = values[i];
  return d;
}

}  // namespace levsketch
