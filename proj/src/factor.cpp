#include "levsketch/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "levsketch/error.hpp"

namespace levsketch {

namespace {

struct Reflector {
  std::vector<double> v;  // acts on rows [offset, rows)
  double beta = 0.0;      // H = I - beta v v^T
  std::size_t offset = 0;
};

// Builds the reflector that zeroes w(offset+1:, col) and applies it to the
// trailing columns [col, cols). Returns the new diagonal value.
double reflect_column(DenseMatrix& w, std::size_t offset, std::size_t col, Reflector& h) {
  const std::size_t m = w.rows();
  const std::size_t len = m - offset;
  h.offset = offset;
  h.v.assign(len, 0.0);
  double xnorm_sq = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    h.v[i] = w(offset + i, col);
    xnorm_sq += h.v[i] * h.v[i];
  }
  const double xnorm = std::sqrt(xnorm_sq);
  if (xnorm == 0.0) {
    h.beta = 0.0;
    return 0.0;
  }
  const double alpha = h.v[0] >= 0.0 ? -xnorm : xnorm;
  h.v[0] -= alpha;
  const double vnorm_sq = xnorm_sq - 2.0 * alpha * (h.v[0] + alpha) + alpha * alpha;
  h.beta = vnorm_sq > 0.0 ? 2.0 / vnorm_sq : 0.0;

  // w(offset:, col+1:) -= beta v (v^T w(offset:, col+1:)), row-major friendly.
  const std::size_t n = w.cols();
  if (col + 1 < n && h.beta != 0.0) {
    std::vector<double> proj(n - col - 1, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      const double vi = h.v[i];
      if (vi == 0.0) continue;
      const double* wi = w.row(offset + i).data() + col + 1;
      for (std::size_t j = 0; j < proj.size(); ++j) proj[j] += vi * wi[j];
    }
    for (std::size_t i = 0; i < len; ++i) {
      const double s = h.beta * h.v[i];
      if (s == 0.0) continue;
      double* wi = w.row(offset + i).data() + col + 1;
      for (std::size_t j = 0; j < proj.size(); ++j) wi[j] -= s * proj[j];
    }
  }
  w(offset, col) = alpha;
  for (std::size_t i = 1; i < len; ++i) w(offset + i, col) = 0.0;
  return alpha;
}

// Q = H_0 H_1 ... H_{k-1} applied to the first k columns of the identity.
DenseMatrix accumulate_q(const std::vector<Reflector>& hs, std::size_t rows, std::size_t k) {
  DenseMatrix q(rows, k);
  for (std::size_t i = 0; i < k; ++i) q(i, i) = 1.0;
  for (std::size_t idx = hs.size(); idx-- > 0;) {
    const Reflector& h = hs[idx];
    if (h.beta == 0.0) continue;
    const std::size_t c0 = h.offset;  // columns < offset are zero in rows >= offset
    std::vector<double> proj(k - c0, 0.0);
    for (std::size_t i = 0; i < h.v.size(); ++i) {
      const double vi = h.v[i];
      if (vi == 0.0) continue;
      const double* qi = q.row(h.offset + i).data() + c0;
      for (std::size_t j = 0; j < proj.size(); ++j) proj[j] += vi * qi[j];
    }
    for (std::size_t i = 0; i < h.v.size(); ++i) {
      const double s = h.beta * h.v[i];
      if (s == 0.0) continue;
      double* qi = q.row(h.offset + i).data() + c0;
      for (std::size_t j = 0; j < proj.size(); ++j) qi[j] -= s * proj[j];
    }
  }
  return q;
}

void check_input(const DenseMatrix& a, double rank_tolerance) {
  require(!a.empty(), ErrorCode::EmptyMatrix, "factorization of an empty matrix");
  require(a.all_finite(), ErrorCode::NonFiniteEntry, "factorization input contains NaN or Inf");
  require(rank_tolerance >= 0.0 && rank_tolerance < 1.0, ErrorCode::InvalidParameter,
          "rank_tolerance must lie in [0, 1)");
}

// One-sided Jacobi on a square matrix given by its columns (rows of `cols`).
// On return the rows of `cols` are mutually orthogonal and `vt` holds the
// accumulated right rotations (rows are columns of V).
void one_sided_jacobi(DenseMatrix& cols, DenseMatrix& vt) {
  const std::size_t n = cols.rows();
  constexpr double kOffTol = 1e-15;
  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto wp = cols.row(p);
        auto wq = cols.row(q);
        const double a = norm2_squared(wp);
        const double b = norm2_squared(wq);
        const double c = dot(wp, wq);
        if (a == 0.0 || b == 0.0) continue;
        if (std::abs(c) <= kOffTol * std::sqrt(a) * std::sqrt(b)) continue;
        rotated = true;
        const double zeta = (b - a) / (2.0 * c);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (std::size_t i = 0; i < wp.size(); ++i) {
          const double xp = wp[i];
          const double xq = wq[i];
          wp[i] = cs * xp - sn * xq;
          wq[i] = sn * xp + cs * xq;
        }
        auto vp = vt.row(p);
        auto vq = vt.row(q);
        for (std::size_t i = 0; i < vp.size(); ++i) {
          const double xp = vp[i];
          const double xq = vq[i];
          vp[i] = cs * xp - sn * xq;
          vq[i] = sn * xp + cs * xq;
        }
      }
    }
    if (!rotated) break;
  }
}

ThinSVD thin_svd_tall(const DenseMatrix& a, double rank_tolerance) {
  const std::size_t n = a.cols();
  QR qr = householder_qr(a);
  DenseMatrix cols = transpose(qr.R);  // row j = column j of R
  DenseMatrix vt = DenseMatrix::identity(n);
  one_sided_jacobi(cols, vt);

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(norm2_squared(cols.row(j)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double smax = sigma[order.front()];
  std::size_t rank = 0;
  while (rank < n && sigma[order[rank]] > 0.0 && sigma[order[rank]] > rank_tolerance * smax) ++rank;

  ThinSVD out;
  out.rank_tolerance = rank_tolerance;
  out.singular_values.resize(rank);
  DenseMatrix ur(n, rank);
  out.V = DenseMatrix(n, rank);
  for (std::size_t k = 0; k < rank; ++k) {
    const std::size_t j = order[k];
    out.singular_values[k] = sigma[j];
    const auto w = cols.row(j);
    const auto v = vt.row(j);
    for (std::size_t i = 0; i < n; ++i) {
      ur(i, k) = w[i] / sigma[j];
      out.V(i, k) = v[i];
    }
  }
  out.U = matmul(qr.Q, ur);
  return out;
}

}  // namespace

QR householder_qr(const DenseMatrix& a) {
  require(!a.empty(), ErrorCode::EmptyMatrix, "QR of an empty matrix");
  require(a.rows() >= a.cols(), ErrorCode::ShapeError, "householder_qr needs rows >= cols");
  const std::size_t n = a.cols();
  DenseMatrix w = a;
  std::vector<Reflector> hs(n);
  for (std::size_t k = 0; k < n; ++k) reflect_column(w, k, k, hs[k]);
  QR out;
  out.R = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.R(i, j) = w(i, j);
  out.Q = accumulate_q(hs, a.rows(), n);
  return out;
}

PivotedQR pivoted_qr(const DenseMatrix& a, double rank_tolerance) {
  check_input(a, rank_tolerance);
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t steps = std::min(m, n);
  DenseMatrix w = a;
  PivotedQR out;
  out.permutation.resize(n);
  std::iota(out.permutation.begin(), out.permutation.end(), std::size_t{0});

  std::vector<Reflector> hs;
  double first_norm = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    // Exact trailing column norms; cheap relative to the reflector updates.
    std::vector<double> norms(n - k, 0.0);
    for (std::size_t i = k; i < m; ++i) {
      const double* wi = w.row(i).data();
      for (std::size_t j = k; j < n; ++j) norms[j - k] += wi[j] * wi[j];
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(norms.begin(), norms.end()) - norms.begin());
    const double best_norm = std::sqrt(norms[best]);
    if (k == 0) first_norm = best_norm;
    if (best_norm == 0.0 || best_norm <= rank_tolerance * first_norm) break;
    const std::size_t p = k + best;
    if (p != k) {
      for (std::size_t i = 0; i < m; ++i) std::swap(w(i, k), w(i, p));
      std::swap(out.permutation[k], out.permutation[p]);
    }
    hs.emplace_back();
    reflect_column(w, k, k, hs.back());
  }
  out.rank = hs.size();
  out.R = DenseMatrix(out.rank, n);
  for (std::size_t i = 0; i < out.rank; ++i)
    for (std::size_t j = i; j < n; ++j) out.R(i, j) = w(i, j);
  out.Q = accumulate_q(hs, m, out.rank);
  return out;
}

DenseMatrix orthonormal_basis(const DenseMatrix& a, double rank_tolerance) {
  return pivoted_qr(a, rank_tolerance).Q;
}

ThinSVD thin_svd(const DenseMatrix& a, double rank_tolerance) {
  check_input(a, rank_tolerance);
  if (a.rows() >= a.cols()) return thin_svd_tall(a, rank_tolerance);
  ThinSVD t = thin_svd_tall(transpose(a), rank_tolerance);
  std::swap(t.U, t.V);
  return t;
}

DenseMatrix pseudoinverse(const DenseMatrix& a, double rank_tolerance) {
  const ThinSVD s = thin_svd(a, rank_tolerance);
  DenseMatrix vs = s.V;
  for (std::size_t i = 0; i < vs.rows(); ++i)
    for (std::size_t k = 0; k < s.rank(); ++k) vs(i, k) /= s.singular_values[k];
  return matmul_nt(vs, s.U);
}

DenseMatrix upper_triangular_inverse(const DenseMatrix& r) {
  require(r.rows() == r.cols(), ErrorCode::ShapeError, "triangular inverse needs a square matrix");
  const std::size_t n = r.rows();
  DenseMatrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    require(r(j, j) != 0.0, ErrorCode::RankDeficient, "zero on the triangular diagonal");
    inv(j, j) = 1.0 / r(j, j);
    for (std::size_t i = j; i-- > 0;) {
      double s = 0.0;
      for (std::size_t k = i + 1; k <= j; ++k) s += r(i, k) * inv(k, j);
      inv(i, j) = -s / r(i, i);
    }
  }
  return inv;
}

double spectral_norm(const DenseMatrix& a) {
  const ThinSVD s = thin_svd(a, 0.0);
  return s.rank() == 0 ? 0.0 : s.singular_values.front();
}

DenseMatrix best_rank_k(const DenseMatrix& a, std::size_t k) {
  const ThinSVD s = thin_svd(a, 0.0);
  const std::size_t kk = std::min(k, s.rank());
  DenseMatrix us = left_columns(s.U, kk);
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < kk; ++j) us(i, j) *= s.singular_values[j];
  return matmul_nt(us, left_columns(s.V, kk));
}

}  // namespace levsketch
