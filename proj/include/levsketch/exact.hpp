#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "levsketch/factor.hpp"
#include "levsketch/matrix.hpp"
#include "levsketch/sketch.hpp"

namespace levsketch {

enum class LeverageMethod { Exact, Sketched, MiEstimator };

std::string_view to_string(LeverageMethod method);

/// Per-row leverage scores with their coherence and normalized distribution.
struct LeverageReport {
  std::vector<double> scores;
  double coherence = 0.0;
  std::vector<double> normalized;  // scores / sum(scores)
  LeverageMethod method = LeverageMethod::Exact;
  std::optional<SketchPlan> params;
  std::optional<std::uint64_t> seed;
  std::size_t rank = 0;  // effective rank used to build the scores
};

/// Fills coherence and normalized from scores.
LeverageReport make_report(std::vector<double> scores, LeverageMethod method);

/// Max score. Throws InvalidParameter on an empty report.
double coherence(const LeverageReport& report);

/// Squared row norms of the left singular basis (any shape, rank-truncated).
LeverageReport exact_leverage(const DenseMatrix& a,
                              double rank_tolerance = kDefaultRankTolerance);

inline constexpr std::size_t kDefaultCrossLeverageCap = 4096;

/// Full n x n projector U U^T. Refuses n above `max_rows`.
DenseMatrix exact_cross_leverage(const DenseMatrix& a,
                                 std::size_t max_rows = kDefaultCrossLeverageCap,
                                 double rank_tolerance = kDefaultRankTolerance);

}  // namespace levsketch
