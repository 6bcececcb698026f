#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "levsketch/leverage.hpp"
#include "levsketch/matrix.hpp"
#include "levsketch/sketch.hpp"

namespace levsketch {

struct HeavyPair {
  std::size_t i = 0;  // i <= j
  std::size_t j = 0;
  double c_sq = 0.0;  // <x_i, x_j>^2

  friend bool operator==(const HeavyPair&, const HeavyPair&) = default;
};

/// Unordered row pairs whose squared inner product clears gram_fro_sq / kappa.
struct HeavyPairSet {
  std::vector<HeavyPair> pairs;  // sorted by (i, j)
  double threshold = 0.0;        // gram_fro_sq / kappa
  double kappa = 0.0;
  double gram_fro_sq = 0.0;      // ||X^T X||_F^2
  std::size_t candidates_checked = 0;
};

/// Exact heavy-pair search: rows are sorted by norm and a two-pointer scan
/// visits only norm-heavy candidates (||x_i||^2 ||x_j||^2 >= threshold), a
/// superset of the heavy pairs by Cauchy-Schwarz. Diagonal pairs (i, i) are
/// included when they clear the threshold.
HeavyPairSet heavy_pairs(const DenseMatrix& x, double kappa);

struct CrossLeverageResult {
  HeavyPairSet pairs;         // final pairs, threshold d / kappa
  double kappa = 0.0;         // caller's kappa
  double search_kappa = 0.0;  // kappa (1 + 30 d eps) used for the sketch search
  std::size_t search_hits = 0;
  ApproxLeverageResult leverage;
};

/// Large cross-leverage scores from the leverage sketch Omega.
///
/// heavy_pairs runs on Omega with the inflated kappa' = kappa (1 + 30 d eps),
/// and the hits are then cut at c_sq >= d / kappa, which is the threshold the
/// heavy-pair search reaches with kappa' = kappa ||Omega^T Omega||_F^2 / d.
/// The reported set therefore records that effective kappa.
CrossLeverageResult approx_cross_leverage(const DenseMatrix& a, const SketchPlan& plan,
                                          double kappa, std::uint64_t seed,
                                          const LeverageOptions& options = {});

/// Drops (i, i) pairs.
HeavyPairSet off_diagonal(HeavyPairSet set);

}  // namespace levsketch
