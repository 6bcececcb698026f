#pragma once

#include <cstddef>
#include <cstdint>

#include "levsketch/exact.hpp"
#include "levsketch/factor.hpp"
#include "levsketch/matrix.hpp"
#include "levsketch/sketch.hpp"

namespace levsketch {

enum class OrthSource { Svd, Qr };

/// d x rho matrix R^-1 such that (Pi_1 A) R^-1 has orthonormal columns.
struct Orthogonalizer {
  DenseMatrix rinv;
  OrthSource source = OrthSource::Svd;
  std::size_t rank = 0;
};

/// n x r2 sketch Omega = A R^-1 Pi_2 whose row geometry approximates that of
/// an orthonormal basis for col(A).
struct SketchedBasis {
  DenseMatrix omega;
  SketchPlan plan;
  std::uint64_t seed1 = 0;  // first-stage (Hadamard) operator seed
  std::uint64_t seed2 = 0;  // second-stage (JLT) operator seed
  std::size_t rank = 0;
};

struct LeverageOptions {
  SketchKind first_stage = SketchKind::SRHT;       // SRHT or FullRHT
  SketchKind second_stage = SketchKind::SparseJLT;  // SparseJLT, Gaussian or Identity
  OrthSource orthogonalizer = OrthSource::Svd;
  // Accept rank(Pi_1 A) < d by truncating instead of raising RankDeficient.
  bool truncate_rank = false;
  double rank_tolerance = kDefaultRankTolerance;
};

struct PhaseTimings {
  double sketch_ms = 0.0;
  double factor_ms = 0.0;
  double product_ms = 0.0;
  double norms_ms = 0.0;
};

struct ApproxLeverageResult {
  LeverageReport report;
  SketchedBasis basis;
  PhaseTimings timings;
};

/// Operator seeds derived from a user seed; stage is 1 or 2.
std::uint64_t stage_seed(std::uint64_t seed, int stage) noexcept;

Orthogonalizer build_orthogonalizer(const DenseMatrix& pa, OrthSource source,
                                    double rank_tolerance = kDefaultRankTolerance,
                                    bool truncate_rank = false);

/// ||(A R^-1)_(i)||^2 for every row: the first-stage estimate before the JLT.
std::vector<double> orthogonalized_row_norms(const DenseMatrix& a, const Orthogonalizer& orth);

/// Relative-error approximation of every leverage score of a tall matrix.
///
/// Pi_1 (SRHT, r1 rows) compresses A, its orthogonalizer R^-1 is formed from
/// Pi_1 A, and scores are the squared row norms of A (R^-1 Pi_2) for a JLT
/// Pi_2 with r2 columns. Rows of A that are exactly zero score exactly 0.
ApproxLeverageResult approx_leverage(const DenseMatrix& a, const SketchPlan& plan,
                                     std::uint64_t seed, const LeverageOptions& options = {});

/// Single-projection estimator w_t = max(d ln^2 n / (4n), A_(t)^T X^(t)) with
/// X = (Pi A)^+ Pi and an SRHT of ceil(n ln d / ln^2 n) rows (clamped to
/// [d, n]). Scores carry the truncated weights, normalized their ratio.
LeverageReport mi_estimate(const DenseMatrix& a, std::uint64_t seed,
                           double rank_tolerance = kDefaultRankTolerance);

/// Row count of the SRHT used by mi_estimate.
std::size_t mi_sketch_rows(std::size_t n, std::size_t d);

}  // namespace levsketch
