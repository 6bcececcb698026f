#include "levsketch/rank_k.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "levsketch/error.hpp"
#include "levsketch/factor.hpp"
#include "levsketch/philox.hpp"
#include "levsketch/sketch.hpp"

namespace levsketch {

namespace {

constexpr std::uint64_t kPiStream = 0x52414e4bull;  // "RANK"

void check_rank_k(std::size_t n, std::size_t d, std::size_t k) {
  require(k >= 2 && k < std::min(n, d), ErrorCode::RankTooLow,
          "rank parameter must satisfy 2 <= k < min(n, d); got k=" + std::to_string(k));
}

void check_epsilon_open(double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidParameter,
          "epsilon must lie in (0, 1)");
}

DenseMatrix gaussian_test_matrix(std::size_t d, std::size_t cols, std::uint64_t seed) {
  const SketchOperator pi{SketchKind::Gaussian, mix64(seed ^ kPiStream), d, cols};
  // Left form is cols x d; Pi itself is its transpose.
  return transpose(to_dense(pi));
}

double max_abs_or_one(const DenseMatrix& b) {
  const double m = max_abs(b);
  return m > 0.0 ? m : 1.0;
}

}  // namespace

std::string_view to_string(RankNorm norm) {
  return norm == RankNorm::Spectral ? "spectral" : "frobenius";
}

RankNorm parse_rank_norm(std::string_view s) {
  if (s == "spectral") return RankNorm::Spectral;
  if (s == "frobenius") return RankNorm::Frobenius;
  raise(ErrorCode::InvalidParameter, "unknown norm '" + std::string(s) + "'");
}

std::size_t power_q(std::size_t n, std::size_t d, std::size_t k, double epsilon) {
  require(k >= 2 && k < std::min(n, d), ErrorCode::InvalidParameter,
          "power_q needs 2 <= k < min(n, d)");
  check_epsilon_open(epsilon);
  const auto kd = static_cast<double>(k);
  const auto m = static_cast<double>(std::min(n, d));
  const double numerator = std::log(1.0 + std::sqrt(kd / (kd - 1.0)) +
                                    std::numbers::e * std::sqrt(2.0 / kd) * std::sqrt(m - kd));
  const double literal = 2.0 * std::log(1.0 + epsilon / 10.0) - 0.5;
  const double denominator = literal > 0.0 ? literal : 2.0 * std::log(1.0 + epsilon / 10.0);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(numerator / denominator)));
}

RankKPlan make_rank_k_plan(std::size_t n, std::size_t d, std::size_t k, double epsilon,
                           RankNorm norm, std::optional<std::size_t> q_override) {
  check_rank_k(n, d, k);
  check_epsilon_open(epsilon);
  RankKPlan plan;
  plan.k = k;
  plan.epsilon = epsilon;
  plan.norm = norm;
  plan.q_override = q_override;
  if (norm == RankNorm::Spectral) {
    plan.r = 2 * k;
    plan.q = q_override ? *q_override : power_q(n, d, k, epsilon);
  } else {
    plan.r = k + static_cast<std::size_t>(std::ceil(10.0 * static_cast<double>(k) / epsilon + 1.0));
  }
  return plan;
}

DenseMatrix spectral_sketch(const DenseMatrix& a, const RankKPlan& plan, std::uint64_t seed,
                            bool reorthonormalize) {
  DenseMatrix b = matmul(a, gaussian_test_matrix(a.cols(), plan.r, seed));
  for (std::size_t step = 0; step < plan.q; ++step) {
    b = matmul(a, matmul_tn(a, b));
    if (reorthonormalize)
      b = orthonormal_basis(b);
    else
      b = (1.0 / max_abs_or_one(b)) * b;
  }
  return b;
}

NormalizedLevReport spectral_rankk(const DenseMatrix& a, std::size_t k, double epsilon,
                                   std::uint64_t seed, const RankKOptions& options) {
  const RankKPlan plan =
      make_rank_k_plan(a.rows(), a.cols(), k, epsilon, RankNorm::Spectral, options.q_override);
  const DenseMatrix b = spectral_sketch(a, plan, seed, options.reorthonormalize);
  require(b.rows() > b.cols(), ErrorCode::ShapeError,
          "spectral sketch needs n > 2k rows for the inner leverage call");

  PlanRequest req;
  req.epsilon = std::min(epsilon, 0.5);
  req.mode = options.inner_mode;
  const SketchPlan inner = make_plan(b.rows(), b.cols(), req);
  LeverageOptions lopts;
  lopts.truncate_rank = true;
  const ApproxLeverageResult lev = approx_leverage(b, inner, mix64(seed ^ 0x4c4556ull), lopts);
  require(lev.basis.rank >= k, ErrorCode::RankTooLow,
          "sketch B has rank " + std::to_string(lev.basis.rank) + " < k");

  const auto& scores = lev.report.scores;
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  NormalizedLevReport out;
  out.p_hat.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out.p_hat[i] = scores[i] / total;
  out.k = k;
  out.norm = RankNorm::Spectral;
  out.beta_claim = (1.0 - epsilon) / (2.0 * (1.0 + epsilon));
  out.seed = seed;
  out.plan = plan;
  return out;
}

RankKApprox restricted_rank_k(const DenseMatrix& a, const DenseMatrix& b, std::size_t k) {
  require(a.rows() == b.rows(), ErrorCode::DimensionMismatch, "B must have the rows of A");
  RankKApprox out;
  out.r = b.cols();
  out.q = orthonormal_basis(b);
  require(out.q.cols() >= k, ErrorCode::RankTooLow,
          "sketch has rank " + std::to_string(out.q.cols()) + " < k");
  const ThinSVD svd = thin_svd(matmul_tn(out.q, a));
  require(svd.rank() >= k, ErrorCode::RankTooLow,
          "Q^T A has rank " + std::to_string(svd.rank()) + " < k");
  out.left = matmul(out.q, left_columns(svd.U, k));
  out.right = DenseMatrix(k, a.cols());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out.right(i, j) = svd.singular_values[i] * svd.V(j, i);
  return out;
}

RankKApprox frobenius_sketch_matrix(const DenseMatrix& a, std::size_t k, double epsilon,
                                    std::uint64_t seed) {
  const RankKPlan plan = make_rank_k_plan(a.rows(), a.cols(), k, epsilon, RankNorm::Frobenius);
  return restricted_rank_k(a, matmul(a, gaussian_test_matrix(a.cols(), plan.r, seed)), k);
}

RankKApprox spectral_sketch_matrix(const DenseMatrix& a, std::size_t k, double epsilon,
                                   std::uint64_t seed, const RankKOptions& options) {
  const RankKPlan plan =
      make_rank_k_plan(a.rows(), a.cols(), k, epsilon, RankNorm::Spectral, options.q_override);
  return restricted_rank_k(a, spectral_sketch(a, plan, seed, options.reorthonormalize), k);
}

NormalizedLevReport frobenius_rankk(const DenseMatrix& a, std::size_t k, double epsilon,
                                    std::uint64_t seed) {
  const RankKApprox sk = frobenius_sketch_matrix(a, k, epsilon, seed);
  NormalizedLevReport out;
  out.p_hat = row_norms_squared(sk.left);
  for (double& p : out.p_hat) p /= static_cast<double>(k);
  out.k = k;
  out.norm = RankNorm::Frobenius;
  out.beta_claim = 1.0;
  out.seed = seed;
  out.plan = make_rank_k_plan(a.rows(), a.cols(), k, epsilon, RankNorm::Frobenius);
  return out;
}

}  // namespace levsketch
