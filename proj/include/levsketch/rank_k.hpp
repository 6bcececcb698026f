#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "levsketch/leverage.hpp"
#include "levsketch/matrix.hpp"

namespace levsketch {

enum class RankNorm { Spectral, Frobenius };

std::string_view to_string(RankNorm norm);
RankNorm parse_rank_norm(std::string_view s);

struct RankKPlan {
  std::size_t k = 2;
  double epsilon = 0.5;
  RankNorm norm = RankNorm::Frobenius;
  std::size_t q = 0;  // power-iteration depth (spectral only)
  std::size_t r = 0;  // Gaussian sketch width
  std::optional<std::size_t> q_override;
};

RankKPlan make_rank_k_plan(std::size_t n, std::size_t d, std::size_t k, double epsilon,
                           RankNorm norm, std::optional<std::size_t> q_override = std::nullopt);

/// Normalized rank-k leverage scores p_hat (nonnegative, summing to one).
struct NormalizedLevReport {
  std::vector<double> p_hat;
  std::size_t k = 0;
  RankNorm norm = RankNorm::Frobenius;
  double beta_claim = 0.0;
  std::uint64_t seed = 0;
  RankKPlan plan;
};

/// Power-iteration depth for the spectral sketch.
///
/// The closed form divides ln(1 + sqrt(k/(k-1)) + e sqrt(2/k) sqrt(min(n,d) - k))
/// by 2 ln(1 + eps/10) - 1/2, which is negative for every eps < 1. In that
/// case the -1/2 is dropped: q = max(1, ceil(numerator / (2 ln(1 + eps/10)))).
std::size_t power_q(std::size_t n, std::size_t d, std::size_t k, double epsilon);

struct RankKOptions {
  std::optional<std::size_t> q_override;
  // Re-orthonormalize B after every (A A^T) step. Off by default: B is only
  // rescaled by a scalar per step, which leaves its column space untouched.
  bool reorthonormalize = false;
  PlanMode inner_mode = PlanMode::Practical;
};

/// B = (A A^T)^q A Pi for a d x 2k Gaussian Pi.
DenseMatrix spectral_sketch(const DenseMatrix& a, const RankKPlan& plan, std::uint64_t seed,
                            bool reorthonormalize = false);

/// Spectral-norm rank-k scores: sketched leverage of B, divided by their sum.
NormalizedLevReport spectral_rankk(const DenseMatrix& a, std::size_t k, double epsilon,
                                   std::uint64_t seed, const RankKOptions& options = {});

/// X = Q (Q^T A)_k kept in factored form X = left * right.
struct RankKApprox {
  DenseMatrix q;      // n x rank(B), orthonormal basis of col(B)
  DenseMatrix left;   // n x k, Q U_{Q^T A, k}; orthonormal columns
  DenseMatrix right;  // k x d, Sigma_k V_k^T
  std::size_t r = 0;
  DenseMatrix assemble() const { return matmul(left, right); }
};

/// Best rank-k approximation of A restricted to col(B).
RankKApprox restricted_rank_k(const DenseMatrix& a, const DenseMatrix& b, std::size_t k);

/// X for the Frobenius path, with B = A Pi.
RankKApprox frobenius_sketch_matrix(const DenseMatrix& a, std::size_t k, double epsilon,
                                        std::uint64_t seed);

/// X for the spectral path, with B from spectral_sketch.
RankKApprox spectral_sketch_matrix(const DenseMatrix& a, std::size_t k, double epsilon,
                                   std::uint64_t seed, const RankKOptions& options = {});

/// Frobenius-norm rank-k scores ||(Q U_k)_(i)||^2 / k: the exact normalized
/// leverage scores of X = Q (Q^T A)_k.
NormalizedLevReport frobenius_rankk(const DenseMatrix& a, std::size_t k, double epsilon,
                                    std::uint64_t seed);

}  // namespace levsketch
