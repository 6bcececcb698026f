#include "levsketch/leverage.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "levsketch/error.hpp"
#include "levsketch/philox.hpp"

namespace levsketch {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

bool row_is_zero(std::span<const double> row) {
  return std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
}

}  // namespace

std::uint64_t stage_seed(std::uint64_t seed, int stage) noexcept {
  return mix64(seed * 0x100000001B3ull + static_cast<std::uint64_t>(stage));
}

Orthogonalizer build_orthogonalizer(const DenseMatrix& pa, OrthSource source,
                                    double rank_tolerance, bool truncate_rank) {
  require(pa.rows() >= pa.cols(), ErrorCode::ShapeError,
          "orthogonalizer input must have at least as many rows as columns");
  const std::size_t d = pa.cols();
  Orthogonalizer orth;
  orth.source = source;

  if (source == OrthSource::Svd) {
    const ThinSVD svd = thin_svd(pa, rank_tolerance);
    require(svd.rank() == d || (truncate_rank && svd.rank() > 0), ErrorCode::RankDeficient,
            "sketched matrix has rank " + std::to_string(svd.rank()) + " < " + std::to_string(d) +
                "; resample with a new seed");
    orth.rank = svd.rank();
    orth.rinv = svd.V;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < orth.rank; ++k) orth.rinv(i, k) /= svd.singular_values[k];
    return orth;
  }

  require(!truncate_rank, ErrorCode::InvalidParameter,
          "rank truncation needs the SVD orthogonalizer");
  const QR qr = householder_qr(pa);
  // The triangular factor shares singular values with pa; test its rank directly.
  const ThinSVD rsvd = thin_svd(qr.R, rank_tolerance);
  require(rsvd.rank() == d, ErrorCode::RankDeficient,
          "sketched matrix has rank " + std::to_string(rsvd.rank()) + " < " + std::to_string(d) +
              "; resample with a new seed");
  orth.rank = d;
  orth.rinv = upper_triangular_inverse(qr.R);
  return orth;
}

std::vector<double> orthogonalized_row_norms(const DenseMatrix& a, const Orthogonalizer& orth) {
  return row_norms_squared(matmul(a, orth.rinv));
}

ApproxLeverageResult approx_leverage(const DenseMatrix& a, const SketchPlan& plan,
                                     std::uint64_t seed, const LeverageOptions& options) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  require(d >= 1 && n > d, ErrorCode::ShapeError,
          "approx_leverage needs a tall matrix (n > d), got " + std::to_string(n) + "x" +
              std::to_string(d));
  require(a.all_finite(), ErrorCode::NonFiniteEntry, "input contains NaN or Inf");
  validate_plan(plan, n, d);
  require(options.first_stage == SketchKind::SRHT || options.first_stage == SketchKind::FullRHT,
          ErrorCode::InvalidParameter, "first stage must be srht or full-rht");
  require(options.second_stage == SketchKind::SparseJLT ||
              options.second_stage == SketchKind::Gaussian ||
              options.second_stage == SketchKind::Identity,
          ErrorCode::InvalidParameter, "second stage must be sparse-jlt, gaussian or identity");

  ApproxLeverageResult out;
  auto t0 = Clock::now();
  SketchOperator pi1{options.first_stage, stage_seed(seed, 1), n,
                     options.first_stage == SketchKind::FullRHT ? next_power_of_two(n) : plan.r1};
  const DenseMatrix pa = apply_srht(pi1, a);
  out.timings.sketch_ms = elapsed_ms(t0);

  t0 = Clock::now();
  const Orthogonalizer orth =
      build_orthogonalizer(pa, options.orthogonalizer, options.rank_tolerance, options.truncate_rank);
  out.timings.factor_ms = elapsed_ms(t0);

  // Omega = A (R^-1 Pi_2): the d x r2 factor is formed first.
  t0 = Clock::now();
  const std::size_t rho = orth.rank;
  DenseMatrix right;
  std::size_t r2 = plan.r2;
  SketchOperator pi2{options.second_stage, stage_seed(seed, 2), rho, r2};
  if (options.second_stage == SketchKind::Identity) {
    pi2.out_dim = r2 = rho;
    right = orth.rinv;
  } else {
    right = apply(pi2, orth.rinv, Side::Right);
    if (options.second_stage == SketchKind::Gaussian)
      right = (1.0 / std::sqrt(static_cast<double>(r2))) * right;
  }
  DenseMatrix omega = matmul(a, right);
  out.timings.product_ms = elapsed_ms(t0);

  t0 = Clock::now();
  std::vector<double> scores = row_norms_squared(omega);
  for (std::size_t i = 0; i < n; ++i) {
    if (row_is_zero(a.row(i))) {
      scores[i] = 0.0;
      std::fill(omega.row(i).begin(), omega.row(i).end(), 0.0);
    }
  }
  out.timings.norms_ms = elapsed_ms(t0);

  SketchPlan used = plan;
  used.r1 = pi1.out_dim;
  used.r2 = r2;
  out.report = make_report(std::move(scores), LeverageMethod::Sketched);
  out.report.params = used;
  out.report.seed = seed;
  out.report.rank = rho;
  out.basis = SketchedBasis{std::move(omega), used, pi1.seed, pi2.seed, rho};
  return out;
}

std::size_t mi_sketch_rows(std::size_t n, std::size_t d) {
  const double ln_n = std::log(static_cast<double>(n));
  const double r = std::ceil(static_cast<double>(n) * std::log(static_cast<double>(d)) /
                             (ln_n * ln_n));
  return std::clamp(static_cast<std::size_t>(std::max(r, 0.0)), d, n);
}

LeverageReport mi_estimate(const DenseMatrix& a, std::uint64_t seed, double rank_tolerance) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  require(d >= 1 && n > d, ErrorCode::ShapeError, "mi_estimate needs a tall matrix (n > d)");
  const std::size_t r = mi_sketch_rows(n, d);
  const SketchOperator pi{SketchKind::SRHT, stage_seed(seed, 1), n, r};

  const ThinSVD svd = thin_svd(apply_srht(pi, a), rank_tolerance);
  require(svd.rank() == d, ErrorCode::RankDeficient,
          "Pi A has rank " + std::to_string(svd.rank()) + " < " + std::to_string(d));
  // ((Pi A)^+)^T = U Sigma^-1 V^T (r x d); X^T = Pi^T ((Pi A)^+)^T (n x d).
  DenseMatrix us = svd.U;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t k = 0; k < d; ++k) us(i, k) /= svd.singular_values[k];
  const DenseMatrix xt = apply_srht_transpose(pi, matmul_nt(us, svd.V));

  const double ln_n = std::log(static_cast<double>(n));
  const double floor = static_cast<double>(d) * ln_n * ln_n / (4.0 * static_cast<double>(n));
  std::vector<double> w(n);
  for (std::size_t t = 0; t < n; ++t) w[t] = std::max(floor, dot(a.row(t), xt.row(t)));

  LeverageReport report = make_report(std::move(w), LeverageMethod::MiEstimator);
  report.seed = seed;
  report.rank = d;
  return report;
}

}  // namespace levsketch
