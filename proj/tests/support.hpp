#pragma once

#include <Eigen/Dense>
#include <random>

#include "levsketch/matrix.hpp"

// Test-side helpers. Random inputs come from std::mt19937 rather than the
// library generator, and Eigen serves as the independent factorization oracle.
namespace testing_support {

inline levsketch::DenseMatrix random_matrix(std::size_t n, std::size_t d, unsigned seed,
                                            double lo = -1.0, double hi = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  levsketch::DenseMatrix a(n, d);
  for (double& v : a.data()) v = dist(gen);
  return a;
}

inline Eigen::MatrixXd to_eigen(const levsketch::DenseMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

inline levsketch::DenseMatrix from_eigen(const Eigen::MatrixXd& m) {
  levsketch::DenseMatrix a(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  return a;
}

// Leverage scores of a full-column-rank matrix through Eigen's JacobiSVD.
inline std::vector<double> eigen_leverage(const levsketch::DenseMatrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a), Eigen::ComputeThinU);
  const Eigen::MatrixXd u = svd.matrixU();
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = u.row(i).squaredNorm();
  return out;
}

inline double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace testing_support
