#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "levsketch/cross.hpp"
#include "levsketch/error.hpp"
#include "levsketch/exact.hpp"
#include "levsketch/generators.hpp"
#include "support.hpp"

using namespace levsketch;
using testing_support::random_matrix;

namespace {

using PairKey = std::pair<std::size_t, std::size_t>;

// Brute force over all n(n+1)/2 pairs against an explicit threshold.
std::set<PairKey> brute_force(const DenseMatrix& x, double threshold) {
  std::set<PairKey> out;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = i; j < x.rows(); ++j) {
      const double c = dot(x.row(i), x.row(j));
      if (c * c >= threshold) out.insert({i, j});
    }
  return out;
}

std::set<PairKey> keys(const HeavyPairSet& s) {
  std::set<PairKey> out;
  for (const HeavyPair& p : s.pairs) out.insert({p.i, p.j});
  return out;
}

// ||X^T X||_F^2 via the n x n Gram: independent of the r x r route.
double gram_fro_sq_via_outer(const DenseMatrix& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j) {
      const double c = dot(x.row(i), x.row(j));
      s += c * c;
    }
  return s;
}

LeverageOptions degenerate() {
  LeverageOptions o;
  o.first_stage = SketchKind::FullRHT;
  o.second_stage = SketchKind::Identity;
  return o;
}

}  // namespace

TEST(HeavyPairs, TwoCanonicalRowsBelowThreshold) {
  const HeavyPairSet s = heavy_pairs(DenseMatrix::identity(2), 1.5);
  EXPECT_TRUE(s.pairs.empty());
  EXPECT_NEAR(s.threshold, 4.0 / 3.0, 1e-15);
}

TEST(HeavyPairs, IdentityDiagonalAtThreshold) {
  const HeavyPairSet s = heavy_pairs(DenseMatrix::identity(4), 4.0);
  ASSERT_EQ(s.pairs.size(), 4u);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(s.pairs[t], (HeavyPair{t, t, 1.0}));
  }
  EXPECT_EQ(s.threshold, 1.0);
}

TEST(HeavyPairs, RandomMatchesBruteForce) {
  const DenseMatrix x = random_matrix(30, 5, 1);
  const HeavyPairSet s = heavy_pairs(x, 10.0);
  EXPECT_EQ(keys(s), brute_force(x, s.threshold));
  EXPECT_NEAR(s.gram_fro_sq, gram_fro_sq_via_outer(x), 1e-12 * s.gram_fro_sq);
}

TEST(HeavyPairs, InvariantsOnManyInstances) {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + gen() % 150;
    const std::size_t r = 1 + gen() % 8;
    DenseMatrix x = random_matrix(n, r, 1000 + trial);
    // Some instances get a few dominant rows so heavy sets are nonempty.
    if (trial % 2 == 0)
      for (std::size_t t = 0; t < 3; ++t)
        for (double& v : x.row(gen() % n)) v *= 8.0;
    for (double kappa : {2.0, 10.0, n * std::log(static_cast<double>(n)) + 1.5}) {
      const HeavyPairSet s = heavy_pairs(x, kappa);
      EXPECT_EQ(keys(s), brute_force(x, s.threshold));
      EXPECT_LE(s.pairs.size(), static_cast<std::size_t>(std::ceil(kappa * r)));
      for (std::size_t t = 0; t < s.pairs.size(); ++t) {
        const HeavyPair& p = s.pairs[t];
        EXPECT_LE(p.i, p.j);
        EXPECT_GE(p.c_sq, s.threshold);
        if (t) EXPECT_LT(std::tie(s.pairs[t - 1].i, s.pairs[t - 1].j), std::tie(p.i, p.j));
      }
      EXPECT_GE(s.candidates_checked, s.pairs.size());
    }
  }
}

TEST(HeavyPairs, TiesAreStable) {
  // Rows with identical norms in scrambled order.
  DenseMatrix x = DenseMatrix::from_rows({{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {0.6, 0.8}});
  const HeavyPairSet a = heavy_pairs(x, 2.0);
  const HeavyPairSet b = heavy_pairs(x, 2.0);
  EXPECT_EQ(a.pairs, b.pairs);
  EXPECT_EQ(keys(a), brute_force(x, a.threshold));
}

TEST(HeavyPairs, Errors) {
  try {
    heavy_pairs(DenseMatrix::identity(3), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidKappa);
  }
  try {
    heavy_pairs(DenseMatrix(5, 2), 3.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroMatrix);
  }
}

TEST(HeavyPairs, OffDiagonalFilter) {
  const HeavyPairSet s = off_diagonal(heavy_pairs(DenseMatrix::identity(4), 4.0));
  EXPECT_TRUE(s.pairs.empty());
}

TEST(CrossLeverage, DegenerateSketchEqualsExactSearch) {
  const DenseMatrix a = planted_pair_matrix(256, 4, 3, 10, 200, 40.0);
  const double kappa = 256.0 * std::log(256.0);
  const CrossLeverageResult r = approx_cross_leverage(a, make_plan(256, 4, {}), kappa, 1, degenerate());
  const DenseMatrix c = exact_cross_leverage(a);
  std::set<PairKey> want;
  for (std::size_t i = 0; i < 256; ++i)
    for (std::size_t j = i; j < 256; ++j)
      if (c(i, j) * c(i, j) >= 4.0 / kappa) want.insert({i, j});
  EXPECT_EQ(keys(r.pairs), want);
  EXPECT_TRUE(want.count({10, 200}));
  EXPECT_NEAR(r.pairs.threshold, 4.0 / kappa, 1e-15);
  EXPECT_NEAR(r.pairs.gram_fro_sq, 4.0, 1e-10);
  EXPECT_NEAR(r.pairs.kappa, kappa, 1e-8 * kappa);
}

TEST(CrossLeverage, OrthogonalRowsGiveNoOffDiagonalPairs) {
  // All true off-diagonal c_ij are 0, so anything returned is JLT noise of
  // size about 1/sqrt(r2). Near kappa = n the threshold d/kappa sits inside
  // that noise and spurious pairs do occur (the additive guarantee
  // d/kappa - 30 eps l_i l_j is vacuous there), so the claim is checked up
  // to kappa = n/4.
  DenseMatrix a(300, 5);
  for (std::size_t i = 0; i < 5; ++i) a(i, i) = 1.0;
  for (double kappa : {2.0, 10.0, 30.0, 75.0}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const CrossLeverageResult r = approx_cross_leverage(a, make_plan(300, 5, {}), kappa, seed);
      EXPECT_TRUE(off_diagonal(r.pairs).pairs.empty()) << "kappa " << kappa << " seed " << seed;
    }
  }
}

TEST(CrossLeverage, PlantedPairRecovered) {
  const DenseMatrix a = planted_pair_matrix(512, 8, 11, 3, 7);
  const double kappa = 512.0 * std::log(512.0);
  int found = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CrossLeverageResult r = approx_cross_leverage(a, make_plan(512, 8, {}), kappa, seed);
    found += keys(r.pairs).count({3, 7}) > 0;
    EXPECT_EQ(r.search_kappa, kappa * (1.0 + 30.0 * 8 * 0.5));
    EXPECT_LE(r.pairs.pairs.size(), r.search_hits);
  }
  EXPECT_GE(found, 8);
}
