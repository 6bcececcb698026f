#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "levsketch/error.hpp"
#include "levsketch/exact.hpp"
#include "levsketch/generators.hpp"
#include "levsketch/rank_k.hpp"
#include "support.hpp"

using namespace levsketch;
using testing_support::max_abs_diff;
using testing_support::random_matrix;

namespace {

DenseMatrix exact_rank(std::size_t n, std::size_t d, std::size_t rank, unsigned seed) {
  return matmul(random_matrix(n, rank, seed), random_matrix(rank, d, seed + 1));
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::IoError;
}

}  // namespace

TEST(PowerQ, FrozenFallbackValue) {
  // ceil(ln(1 + sqrt(10/9) + e sqrt(0.2) sqrt(990)) / (2 ln 1.05)) evaluated independently.
  EXPECT_EQ(power_q(1000, 1000, 10, 0.5), 38u);
}

TEST(PowerQ, LiteralDenominatorIsNegative) {
  for (double eps : {0.01, 0.1, 0.5, 0.99}) EXPECT_LT(2.0 * std::log(1.0 + eps / 10.0) - 0.5, 0.0);
}

TEST(PowerQ, NonincreasingInEpsilon) {
  std::size_t prev = power_q(500, 300, 5, 0.01);
  for (double eps = 0.02; eps < 1.0; eps += 0.01) {
    const std::size_t q = power_q(500, 300, 5, eps);
    EXPECT_LE(q, prev);
    prev = q;
  }
  EXPECT_EQ(code_of([] { power_q(10, 10, 1, 0.5); }), ErrorCode::InvalidParameter);
}

TEST(RankKPlan, Widths) {
  const RankKPlan f = make_rank_k_plan(200, 200, 5, 0.5, RankNorm::Frobenius);
  EXPECT_EQ(f.r, 5u + 101u);
  const RankKPlan s = make_rank_k_plan(200, 200, 5, 0.5, RankNorm::Spectral);
  EXPECT_EQ(s.r, 10u);
  EXPECT_EQ(s.q, power_q(200, 200, 5, 0.5));
  EXPECT_EQ(make_rank_k_plan(200, 200, 5, 0.5, RankNorm::Spectral, 3).q, 3u);
  EXPECT_EQ(code_of([] { make_rank_k_plan(50, 50, 1, 0.5, RankNorm::Spectral); }), ErrorCode::RankTooLow);
  EXPECT_EQ(code_of([] { make_rank_k_plan(50, 8, 8, 0.5, RankNorm::Spectral); }), ErrorCode::RankTooLow);
}

TEST(FrobeniusRankK, SumsToOneAndSelfConsistent) {
  const DenseMatrix a = random_matrix(120, 90, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const NormalizedLevReport rep = frobenius_rankk(a, 4, 0.5, seed);
    EXPECT_NEAR(sum(rep.p_hat), 1.0, 1e-12);
    for (double p : rep.p_hat) EXPECT_GE(p, 0.0);
    const DenseMatrix x = frobenius_sketch_matrix(a, 4, 0.5, seed).assemble();
    const LeverageReport ex = exact_leverage(x);
    EXPECT_EQ(ex.rank, 4u);
    std::vector<double> scaled = rep.p_hat;
    for (double& p : scaled) p *= 4.0;
    EXPECT_LT(max_abs_diff(scaled, ex.scores), 1e-8);
    EXPECT_EQ(rep.beta_claim, 1.0);
  }
}

TEST(FrobeniusRankK, ExactRankKIsRecovered) {
  const DenseMatrix a = exact_rank(60, 50, 3, 7);
  const RankKApprox sk = frobenius_sketch_matrix(a, 3, 0.5, 2);
  EXPECT_LT(frobenius_norm(a - sk.assemble()), 1e-9 * frobenius_norm(a));
  const LeverageReport ex = exact_leverage(a);
  ASSERT_EQ(ex.rank, 3u);
  EXPECT_LT(max_abs_diff(frobenius_rankk(a, 3, 0.5, 2).p_hat, ex.normalized), 1e-9);
}

TEST(FrobeniusRankK, ResidualNeverBeatsOptimal) {
  const DenseMatrix a = random_matrix(200, 200, 9);
  const double opt = frobenius_norm(a - best_rank_k(a, 5));
  int within = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double res = frobenius_norm(a - frobenius_sketch_matrix(a, 5, 0.5, seed).assemble());
    EXPECT_GE(res, opt * (1.0 - 1e-12));
    within += res <= 1.5 * opt;
  }
  EXPECT_GE(within, 8);
}

TEST(FrobeniusRankK, ExpectedSquaredResidual) {
  // Monte Carlo mean of ||A - X||_F^2 over 50 seeds vs (1 + eps/10) ||A - A_k||_F^2,
  // on a matrix with a decaying spectrum so the bound is not trivially loose.
  DenseMatrix a = random_matrix(120, 120, 11);
  const ThinSVD s = thin_svd(a);
  std::vector<double> sv(s.rank());
  for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = std::pow(0.9, static_cast<double>(i));
  DenseMatrix us = s.U;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < sv.size(); ++j) us(i, j) *= sv[j];
  a = matmul_nt(us, s.V);
  const double opt = std::pow(frobenius_norm(a - best_rank_k(a, 4)), 2);
  std::vector<double> res;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    res.push_back(std::pow(frobenius_norm(a - frobenius_sketch_matrix(a, 4, 0.5, seed).assemble()), 2));
  const double mean = sum(res) / 50.0;
  double var = 0.0;
  for (double r : res) var += (r - mean) * (r - mean);
  const double se = std::sqrt(var / 49.0 / 50.0);
  EXPECT_LE(mean, 1.05 * opt + 2.0 * se);
}

TEST(SpectralRankK, NormalizedAndNonnegative) {
  const DenseMatrix a = random_matrix(150, 100, 13);
  const NormalizedLevReport rep = spectral_rankk(a, 5, 0.5, 1);
  EXPECT_NEAR(sum(rep.p_hat), 1.0, 1e-12);
  for (double p : rep.p_hat) EXPECT_GE(p, 0.0);
  EXPECT_NEAR(rep.beta_claim, 0.5 / 3.0, 1e-15);
  EXPECT_EQ(rep.plan.r, 10u);
}

TEST(SpectralRankK, ExactRankRecoversColumnSpaceLeverage) {
  const DenseMatrix a = exact_rank(100, 100, 2, 17);
  const std::vector<double> want = exact_leverage(a).normalized;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = spectral_rankk(a, 2, 0.5, seed).p_hat;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(p[i] - want[i]) / want[i]);
    ok += worst <= 0.5;
  }
  EXPECT_GE(ok, 8);
}

TEST(SpectralRankK, RowPermutationPermutesScores) {
  // Power iteration commutes with row permutations; the inner SRHT does not,
  // so the permuted scores agree up to sketching error.
  const DenseMatrix a = random_matrix(128, 60, 19);
  std::vector<std::size_t> perm(128);
  for (std::size_t i = 0; i < 128; ++i) perm[i] = (i * 37 + 5) % 128;
  const DenseMatrix pa = select_rows(a, perm);
  const auto p = spectral_rankk(a, 3, 0.5, 4).p_hat;
  const auto pp = spectral_rankk(pa, 3, 0.5, 4).p_hat;
  const DenseMatrix b = spectral_sketch(a, make_rank_k_plan(128, 60, 3, 0.5, RankNorm::Spectral), 4);
  const DenseMatrix pb = spectral_sketch(pa, make_rank_k_plan(128, 60, 3, 0.5, RankNorm::Spectral), 4);
  EXPECT_LT(max_abs(select_rows(b, perm) - pb), 1e-12 * max_abs(b));
  for (std::size_t i = 0; i < 128; ++i) EXPECT_NEAR(pp[i] / p[perm[i]], 1.0, 0.75);
}

TEST(SpectralRankK, ResidualAndLowerBound) {
  const DenseMatrix a = random_matrix(200, 200, 23);
  const double opt = spectral_norm(a - best_rank_k(a, 5));
  int residual_ok = 0;
  int bound_ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RankKApprox x = spectral_sketch_matrix(a, 5, 0.5, seed);
    residual_ok += spectral_norm(a - x.assemble()) <= 1.5 * opt;
    const NormalizedLevReport rep = spectral_rankk(a, 5, 0.5, seed);
    const std::vector<double> ux = row_norms_squared(x.left);
    bool all = true;
    for (std::size_t i = 0; i < ux.size(); ++i) all = all && rep.p_hat[i] >= rep.beta_claim * ux[i] / 5.0;
    bound_ok += all;
  }
  EXPECT_GE(residual_ok, 7);
  EXPECT_GE(bound_ok, 7);
}

TEST(RankK, GapCaseConcentratesOnTopBlock) {
  // A = diag(I_k, (1 - gamma) I_{n-k}) with gamma = 0.5.
  const std::size_t n = 160;
  const std::size_t k = 4;
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = i < k ? 1.0 : 0.5;
  for (const auto& p : {frobenius_rankk(a, k, 0.5, 1).p_hat, spectral_rankk(a, k, 0.5, 1).p_hat}) {
    const double top = std::accumulate(p.begin(), p.begin() + k, 0.0);
    EXPECT_GT(top, 0.5);
    const double top_min = *std::min_element(p.begin(), p.begin() + k);
    const double rest_max = *std::max_element(p.begin() + k, p.end());
    EXPECT_GT(top_min, rest_max);
  }
}
