#pragma once

#include <cstddef>
#include <vector>

#include "levsketch/matrix.hpp"

namespace levsketch {

inline constexpr double kDefaultRankTolerance = 1e-12;

/// Compact SVD A = U diag(sigma) V^T keeping only sigma_i > tol * sigma_1.
struct ThinSVD {
  DenseMatrix U;                     // n x rho
  std::vector<double> singular_values;  // descending, length rho
  DenseMatrix V;                     // d x rho
  double rank_tolerance = kDefaultRankTolerance;

  std::size_t rank() const noexcept { return singular_values.size(); }
};

/// Householder QR of a matrix with rows >= cols: A = Q R, Q with orthonormal
/// columns (rows x cols), R upper triangular (cols x cols).
struct QR {
  DenseMatrix Q;
  DenseMatrix R;
};

QR householder_qr(const DenseMatrix& a);

/// Column-pivoted Householder QR truncated at the numerical rank:
/// A P = Q R with Q (rows x rank) orthonormal and R (rank x cols).
struct PivotedQR {
  DenseMatrix Q;
  DenseMatrix R;
  std::vector<std::size_t> permutation;  // column j of A P is column permutation[j] of A
  std::size_t rank = 0;
};

PivotedQR pivoted_qr(const DenseMatrix& a, double rank_tolerance = kDefaultRankTolerance);

/// Orthonormal basis for the column space of `a` (pivoted QR, truncated).
DenseMatrix orthonormal_basis(const DenseMatrix& a, double rank_tolerance = kDefaultRankTolerance);

// Any shape. Tall inputs are reduced by Householder QR first and the
// triangular factor is diagonalized with one-sided Jacobi rotations; wide
// inputs go through the transpose.
ThinSVD thin_svd(const DenseMatrix& a, double rank_tolerance = kDefaultRankTolerance);

DenseMatrix pseudoinverse(const DenseMatrix& a, double rank_tolerance = kDefaultRankTolerance);

/// Inverse of an upper-triangular matrix with nonzero diagonal.
DenseMatrix upper_triangular_inverse(const DenseMatrix& r);

/// Largest singular value (full SVD, no truncation issues for the maximum).
double spectral_norm(const DenseMatrix& a);

/// Best rank-k approximation U_k diag(sigma_k) V_k^T.
DenseMatrix best_rank_k(const DenseMatrix& a, std::size_t k);

}  // namespace levsketch
