#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "levsketch/exact.hpp"
#include "levsketch/matrix.hpp"
#include "levsketch/sketch.hpp"

namespace levsketch {

/// Probabilities over the d columns of an under-constrained system, with the
/// factor beta by which they may undershoot the normalized column leverage.
struct SamplingProbabilities {
  std::vector<double> p;
  double beta = 1.0;
};

void validate(const SamplingProbabilities& probs);

/// Column-selection-and-rescaling operator S (d x r) with one nonzero per
/// column: S(selected[t], t) = weights[t] = 1 / sqrt(r p_selected[t]).
struct SamplingMatrix {
  std::size_t d = 0;
  std::size_t r = 0;
  std::vector<std::size_t> selected;
  std::vector<double> weights;

  DenseMatrix to_dense() const;
};

/// ceil((96 n / (beta eps^2)) ln(96 n / (beta eps^2 sqrt(delta)))).
std::size_t sample_size(std::size_t n, double beta, double epsilon, double delta);

/// r i.i.d. draws with replacement from p; zero-probability columns are never drawn.
SamplingMatrix draw_sampling_matrix(const SamplingProbabilities& probs, std::size_t r,
                                    std::uint64_t seed);

/// A S: the sampled, rescaled columns of A (n x r).
DenseMatrix sample_columns(const DenseMatrix& a, const SamplingMatrix& s);

struct UnderLsSolution {
  std::vector<double> x;
  std::size_t r = 0;
  double residual_norm = 0.0;  // ||A x - b||
  SamplingMatrix sampling;
};

/// x~ = A^T (A S)^+T (A S)^+ b for a leverage-sampled S with r = sample_size(...)
/// columns unless r_override is given. Requires n < d.
UnderLsSolution underls_solve(const DenseMatrix& a, std::span<const double> b,
                              const SamplingProbabilities& probs, double epsilon, double delta,
                              std::uint64_t seed,
                              std::optional<std::size_t> r_override = std::nullopt);

enum class ProbabilityMethod { Exact, Sketched };

/// Column probabilities from the leverage scores of A^T, exactly or via the
/// sketched estimator (beta = (1 - eps)/(1 + eps) in that case).
SamplingProbabilities leverage_probs_for_columns(const DenseMatrix& a, ProbabilityMethod method,
                                                 std::optional<SketchPlan> plan = std::nullopt,
                                                 std::optional<std::uint64_t> seed = std::nullopt);

/// Minimum-norm solution A^+ b.
std::vector<double> min_norm_solution(const DenseMatrix& a, std::span<const double> b);

}  // namespace levsketch
