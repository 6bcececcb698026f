#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "levsketch/error.hpp"
#include "levsketch/exact.hpp"
#include "levsketch/generators.hpp"
#include "levsketch/leverage.hpp"
#include "levsketch/parallel.hpp"
#include "support.hpp"

using namespace levsketch;
using testing_support::eigen_leverage;
using testing_support::max_abs_diff;
using testing_support::random_matrix;

namespace {

DenseMatrix canonical_rows(std::size_t n, std::size_t d) {
  DenseMatrix a(n, d);
  for (std::size_t i = 0; i < d; ++i) a(i, i) = 1.0;
  return a;
}

LeverageOptions degenerate() {
  LeverageOptions o;
  o.first_stage = SketchKind::FullRHT;
  o.second_stage = SketchKind::Identity;
  return o;
}

double max_rel_err(const std::vector<double>& approx, const std::vector<double>& exact) {
  double m = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i)
    if (exact[i] > 0.0) m = std::max(m, std::abs(approx[i] - exact[i]) / exact[i]);
  return m;
}

}  // namespace

TEST(ExactLeverage, CanonicalRows) {
  const LeverageReport r = exact_leverage(canonical_rows(10, 3));
  const std::vector<double> want = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_LT(max_abs_diff(r.scores, want), 1e-14);
  EXPECT_EQ(coherence(r), r.coherence);
  EXPECT_NEAR(r.coherence, 1.0, 1e-14);
  EXPECT_EQ(r.method, LeverageMethod::Exact);
}

TEST(ExactLeverage, HadamardColumnsAreUniform) {
  const LeverageReport r = exact_leverage(hadamard_columns(256, 8));
  for (double s : r.scores) EXPECT_NEAR(s, 8.0 / 256.0, 1e-13);
  EXPECT_NEAR(r.coherence, 8.0 / 256.0, 1e-13);
}

TEST(ExactLeverage, MatchesProjectorDiagonalAndEigen) {
  const DenseMatrix a = random_matrix(64, 6, 3);
  const LeverageReport r = exact_leverage(a);
  const DenseMatrix proj = matmul(a, pseudoinverse(a));
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(r.scores[i], proj(i, i), 1e-10);
  EXPECT_LT(max_abs_diff(r.scores, eigen_leverage(a)), 1e-12);
}

TEST(ExactLeverage, TraceNormalizationAndScale) {
  const DenseMatrix a = random_matrix(80, 7, 4);
  const LeverageReport r = exact_leverage(a);
  EXPECT_NEAR(std::accumulate(r.scores.begin(), r.scores.end(), 0.0), 7.0, 1e-10);
  EXPECT_NEAR(std::accumulate(r.normalized.begin(), r.normalized.end(), 0.0), 1.0, 1e-12);
  for (double s : r.scores) {
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0 + 1e-12);
  }
  EXPECT_LT(max_abs_diff(exact_leverage(-3.5e5 * a).scores, r.scores), 1e-12);
}

TEST(ExactLeverage, BasisIndependence) {
  const DenseMatrix a = random_matrix(50, 5, 5);
  const std::vector<double> via_qr = row_norms_squared(householder_qr(a).Q);
  EXPECT_LT(max_abs_diff(exact_leverage(a).scores, via_qr), 1e-10);
}

TEST(ExactLeverage, RankDeficientTruncates) {
  DenseMatrix a = random_matrix(40, 4, 6);
  for (std::size_t i = 0; i < 40; ++i) a(i, 3) = a(i, 1);
  const LeverageReport r = exact_leverage(a);
  EXPECT_EQ(r.rank, 3u);
  EXPECT_NEAR(std::accumulate(r.scores.begin(), r.scores.end(), 0.0), 3.0, 1e-8);
}

TEST(ExactCrossLeverage, ProjectorProperties) {
  EXPECT_LT(max_abs(exact_cross_leverage(DenseMatrix::identity(2)) - DenseMatrix::identity(2)), 1e-15);
  const DenseMatrix a = random_matrix(10, 3, 7);
  const DenseMatrix c = exact_cross_leverage(a);
  const DenseMatrix u = thin_svd(a).U;
  EXPECT_LT(max_abs(c - matmul_nt(u, u)), 1e-10);
  EXPECT_LT(max_abs(c - transpose(c)), 1e-15);
  EXPECT_LT(max_abs(matmul(c, c) - c), 1e-8);
  const LeverageReport r = exact_leverage(a);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(c(i, i), r.scores[i], 1e-12);
}

TEST(ExactCrossLeverage, DuplicateRows) {
  DenseMatrix a = random_matrix(12, 3, 8);
  for (std::size_t j = 0; j < 3; ++j) a(7, j) = a(2, j);
  const DenseMatrix c = exact_cross_leverage(a);
  EXPECT_NEAR(c(2, 7), c(2, 2), 1e-12);
}

TEST(ExactCrossLeverage, Cap) {
  try {
    exact_cross_leverage(DenseMatrix(20, 2), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MatrixTooLargeForDenseGram);
  }
}

TEST(ApproxLeverage, DegenerateCanonicalRows) {
  const ApproxLeverageResult r = approx_leverage(canonical_rows(64, 4), make_plan(64, 4, {}), 1, degenerate());
  std::vector<double> want(64, 0.0);
  std::fill(want.begin(), want.begin() + 4, 1.0);
  EXPECT_LT(max_abs_diff(r.report.scores, want), 1e-10);
}

TEST(ApproxLeverage, DegenerateMatchesExact) {
  for (unsigned s = 0; s < 5; ++s) {
    const DenseMatrix a = random_matrix(300 + 37 * s, 5 + s, 20 + s);
    const auto r = approx_leverage(a, make_plan(a.rows(), a.cols(), {}), s, degenerate());
    EXPECT_LT(max_abs_diff(r.report.scores, exact_leverage(a).scores), 1e-9);
  }
}

TEST(ApproxLeverage, HadamardColumnsNearUniform) {
  const DenseMatrix a = hadamard_columns(256, 8);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = approx_leverage(a, make_plan(256, 8, {}), seed);
    bool all = true;
    for (double s : r.report.scores) all = all && std::abs(s - 8.0 / 256.0) <= 0.5 * 8.0 / 256.0;
    ok += all;
  }
  EXPECT_GE(ok, 8);
}

TEST(ApproxLeverage, GaussianRelativeError) {
  const DenseMatrix a = gaussian_matrix(2048, 16, 99);
  const std::vector<double> exact = exact_leverage(a).scores;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    ok += max_rel_err(approx_leverage(a, make_plan(2048, 16, {}), seed).report.scores, exact) <= 0.5;
  EXPECT_GE(ok, 8);
}

TEST(ApproxLeverage, SubsampledFirstStage) {
  // ceil(20 * 8 * ln 16384) = 1553 rows out of 16384: the SRHT really samples.
  const DenseMatrix a = spiked_matrix(16384, 8, 7);
  const SketchPlan plan = make_plan(16384, 8, {});
  ASSERT_LT(plan.r1, 16384u);
  const std::vector<double> exact = exact_leverage(a).scores;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    ok += max_rel_err(approx_leverage(a, plan, seed).report.scores, exact) <= 0.5;
  EXPECT_GE(ok, 4);
}

TEST(ApproxLeverage, SvdAndQrOrthogonalizersAgree) {
  const DenseMatrix a = random_matrix(500, 6, 31);
  const SketchOperator pi1{SketchKind::SRHT, 5, 500, 120};
  const DenseMatrix pa = apply_srht(pi1, a);
  const Orthogonalizer svd = build_orthogonalizer(pa, OrthSource::Svd);
  const Orthogonalizer qr = build_orthogonalizer(pa, OrthSource::Qr);
  for (const Orthogonalizer* o : {&svd, &qr})
    EXPECT_LT(max_abs(matmul_tn(matmul(pa, o->rinv), matmul(pa, o->rinv)) - DenseMatrix::identity(6)), 1e-8);
  EXPECT_LT(max_abs_diff(orthogonalized_row_norms(a, svd), orthogonalized_row_norms(a, qr)), 1e-9);
}

TEST(ApproxLeverage, OrthogonalizerOfScaledBasis) {
  DenseMatrix pa(5, 2);
  pa(0, 0) = 2.0;
  pa(1, 1) = 3.0;
  const Orthogonalizer o = build_orthogonalizer(pa, OrthSource::Svd);
  const DenseMatrix q = matmul(pa, o.rinv);
  EXPECT_LT(max_abs(matmul_tn(q, q) - DenseMatrix::identity(2)), 1e-14);
  // Up to a rotation, R^-1 = diag(1/2, 1/3): R^-1 R^-T is rotation-free.
  const DenseMatrix g = matmul_nt(o.rinv, o.rinv);
  EXPECT_NEAR(g(0, 0), 0.25, 1e-14);
  EXPECT_NEAR(g(1, 1), 1.0 / 9.0, 1e-14);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-14);
}

TEST(ApproxLeverage, OrthonormalInputKeepsRowNorms) {
  const DenseMatrix u = householder_qr(random_matrix(40, 3, 9)).Q;
  const Orthogonalizer o = build_orthogonalizer(u, OrthSource::Svd);
  EXPECT_LT(max_abs(matmul_tn(o.rinv, o.rinv) - DenseMatrix::identity(3)), 1e-12);
  EXPECT_LT(max_abs_diff(orthogonalized_row_norms(u, o), row_norms_squared(u)), 1e-12);
}

TEST(ApproxLeverage, ScaleInvariance) {
  const DenseMatrix a = random_matrix(700, 5, 10);
  const SketchPlan plan = make_plan(700, 5, {});
  const auto base = approx_leverage(a, plan, 3).report.scores;
  const auto scaled = approx_leverage(1024.0 * a, plan, 3).report.scores;
  // Exact for power-of-two scaling; the rotation in R^-1 is scale-free.
  EXPECT_LT(max_abs_diff(base, scaled), 1e-12);
  EXPECT_LT(max_abs_diff(base, approx_leverage(0.37 * a, plan, 3).report.scores), 1e-10);
}

TEST(ApproxLeverage, ZeroRowsScoreZero) {
  DenseMatrix a = random_matrix(300, 4, 12);
  for (std::size_t i : {5u, 77u, 299u}) std::fill(a.row(i).begin(), a.row(i).end(), 0.0);
  const auto r = approx_leverage(a, make_plan(300, 4, {}), 4);
  for (std::size_t i : {5u, 77u, 299u}) EXPECT_EQ(r.report.scores[i], 0.0);
  EXPECT_EQ(r.basis.omega.rows(), 300u);
}

TEST(ApproxLeverage, DeterministicAcrossThreads) {
  const DenseMatrix a = random_matrix(4000, 8, 13);
  const SketchPlan plan = make_plan(4000, 8, {});
  set_num_threads(1);
  const auto one = approx_leverage(a, plan, 8).report.scores;
  set_num_threads(3);
  const auto three = approx_leverage(a, plan, 8).report.scores;
  set_num_threads(1);
  EXPECT_EQ(one, three);
  EXPECT_EQ(one, approx_leverage(a, plan, 8).report.scores);
}

TEST(ApproxLeverage, ReportCarriesPlanAndSeed) {
  const DenseMatrix a = random_matrix(300, 3, 14);
  const auto r = approx_leverage(a, make_plan(300, 3, {}), 42);
  ASSERT_TRUE(r.report.params.has_value());
  EXPECT_EQ(r.report.params->r2, r.basis.omega.cols());
  EXPECT_EQ(r.report.seed, 42u);
  EXPECT_EQ(r.report.method, LeverageMethod::Sketched);
  EXPECT_NEAR(coherence(r.report), *std::max_element(r.report.scores.begin(), r.report.scores.end()), 0.0);
}

TEST(ApproxLeverage, RankDeficientRaises) {
  DenseMatrix a = random_matrix(200, 4, 15);
  for (std::size_t i = 0; i < 200; ++i) a(i, 2) = a(i, 0) + a(i, 1);
  try {
    approx_leverage(a, make_plan(200, 4, {}), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
}

TEST(ApproxLeverage, RejectsWideAndNonFinite) {
  try {
    approx_leverage(DenseMatrix(4, 4), {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeError);
  }
}

TEST(ApproxLeverage, TwoStageErrorsComposeUnderTriangleBound) {
  // l_hat (before the JLT) and l_tilde (after) measured separately.
  const DenseMatrix a = gaussian_matrix(4096, 8, 16);
  const std::vector<double> exact = exact_leverage(a).scores;
  const SketchPlan plan = make_plan(4096, 8, {});
  const double eps = plan.epsilon;
  const auto r = approx_leverage(a, plan, 5);
  const SketchOperator pi1{SketchKind::SRHT, r.basis.seed1, 4096, plan.r1};
  const auto lhat = orthogonalized_row_norms(a, build_orthogonalizer(apply_srht(pi1, a), OrthSource::Svd));
  // First stage: l_hat within eps/(1-eps) of l.
  EXPECT_LE(max_rel_err(lhat, exact), eps / (1.0 - eps));
  double total = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i)
    total = std::max(total, std::abs(r.report.scores[i] - exact[i]) / exact[i]);
  EXPECT_LE(total, 4.0 * eps);
}

TEST(MiEstimate, FloorNormalizationAndQuality) {
  const DenseMatrix a = random_matrix(1024, 8, 17);
  const LeverageReport r = mi_estimate(a, 3);
  const double ln_n = std::log(1024.0);
  const double floor = 8.0 * ln_n * ln_n / (4.0 * 1024.0);
  for (double w : r.scores) EXPECT_GE(w, floor);
  EXPECT_NEAR(std::accumulate(r.normalized.begin(), r.normalized.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(r.method, LeverageMethod::MiEstimator);

  const LeverageReport ex = exact_leverage(a);
  std::vector<std::size_t> order(1024);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + 8, order.end(),
                    [&](std::size_t x, std::size_t y) { return ex.scores[x] > ex.scores[y]; });
  double mi_top = 0.0;
  double ex_top = 0.0;
  for (std::size_t t = 0; t < 8; ++t) {
    mi_top += r.normalized[order[t]];
    ex_top += ex.normalized[order[t]];
  }
  EXPECT_LE(std::max(mi_top / ex_top, ex_top / mi_top), ln_n * ln_n);
}
