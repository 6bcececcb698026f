#include "levsketch/under_ls.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "levsketch/error.hpp"
#include "levsketch/factor.hpp"
#include "levsketch/leverage.hpp"
#include "levsketch/philox.hpp"

namespace levsketch {

namespace {

constexpr std::uint64_t kDrawStream = 0x44524157ull;  // "DRAW"

double residual(const DenseMatrix& a, std::span<const double> x, std::span<const double> b) {
  const std::vector<double> ax = matvec(a, x);
  double s = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) s += (ax[i] - b[i]) * (ax[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

void validate(const SamplingProbabilities& probs) {
  require(!probs.p.empty(), ErrorCode::InvalidParameter, "empty probability vector");
  require(probs.beta > 0.0 && probs.beta <= 1.0, ErrorCode::InvalidParameter,
          "beta must lie in (0, 1]");
  double total = 0.0;
  for (double v : probs.p) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidParameter,
            "probabilities must be finite and nonnegative");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-9, ErrorCode::InvalidParameter,
          "probabilities must sum to one");
}

DenseMatrix SamplingMatrix::to_dense() const {
  DenseMatrix s(d, r);
  for (std::size_t t = 0; t < r; ++t) s(selected[t], t) = weights[t];
  return s;
}

std::size_t sample_size(std::size_t n, double beta, double epsilon, double delta) {
  require(n >= 1, ErrorCode::InvalidParameter, "n must be >= 1");
  require(beta > 0.0 && beta <= 1.0, ErrorCode::InvalidParameter, "beta must lie in (0, 1]");
  require(epsilon > 0.0 && epsilon <= 0.5, ErrorCode::InvalidParameter,
          "epsilon must lie in (0, 1/2]");
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidParameter, "delta must lie in (0, 1)");
  const double base = 96.0 * static_cast<double>(n) / (beta * epsilon * epsilon);
  return static_cast<std::size_t>(std::ceil(base * std::log(base / std::sqrt(delta))));
}

SamplingMatrix draw_sampling_matrix(const SamplingProbabilities& probs, std::size_t r,
                                    std::uint64_t seed) {
  validate(probs);
  require(r >= 1, ErrorCode::InvalidParameter, "r must be >= 1");
  const std::size_t d = probs.p.size();
  std::vector<double> cumulative(d);
  std::partial_sum(probs.p.begin(), probs.p.end(), cumulative.begin());
  const double total = cumulative.back();

  SamplingMatrix s;
  s.d = d;
  s.r = r;
  s.selected.resize(r);
  s.weights.resize(r);
  const RandomStream rs(seed, kDrawStream);
  for (std::size_t t = 0; t < r; ++t) {
    const double u = rs.uniform(t) * total;
    // First index whose cumulative mass exceeds u; it always has p > 0.
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t i = it == cumulative.end() ? d - 1 : static_cast<std::size_t>(it - cumulative.begin());
    while (probs.p[i] == 0.0) --i;  // only reachable through the end() clamp
    s.selected[t] = i;
    s.weights[t] = 1.0 / std::sqrt(static_cast<double>(r) * probs.p[i]);
  }
  return s;
}

DenseMatrix sample_columns(const DenseMatrix& a, const SamplingMatrix& s) {
  require(a.cols() == s.d, ErrorCode::DimensionMismatch, "sampling matrix does not match A");
  DenseMatrix as(a.rows(), s.r);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ai = a.row(i);
    auto out = as.row(i);
    for (std::size_t t = 0; t < s.r; ++t) out[t] = ai[s.selected[t]] * s.weights[t];
  }
  return as;
}

UnderLsSolution underls_solve(const DenseMatrix& a, std::span<const double> b,
                              const SamplingProbabilities& probs, double epsilon, double delta,
                              std::uint64_t seed, std::optional<std::size_t> r_override) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  require(n >= 1 && n < d, ErrorCode::ShapeError,
          "under-constrained solve needs n < d, got " + std::to_string(n) + "x" + std::to_string(d));
  require(b.size() == n, ErrorCode::DimensionMismatch, "right-hand side length must equal n");
  require(probs.p.size() == d, ErrorCode::DimensionMismatch, "need one probability per column");

  UnderLsSolution out;
  out.r = r_override ? *r_override : sample_size(n, probs.beta, epsilon, delta);
  out.sampling = draw_sampling_matrix(probs, out.r, seed);

  // (AS)^+T (AS)^+ = U Sigma^-2 U^T for AS = U Sigma W^T of full row rank.
  const ThinSVD svd = thin_svd(sample_columns(a, out.sampling));
  require(svd.rank() == n, ErrorCode::RankDeficient,
          "A S has rank " + std::to_string(svd.rank()) + " < " + std::to_string(n) +
              "; resample with a new seed");
  std::vector<double> coeff = matvec_t(svd.U, b);
  for (std::size_t k = 0; k < n; ++k)
    coeff[k] /= svd.singular_values[k] * svd.singular_values[k];
  out.x = matvec_t(a, matvec(svd.U, coeff));
  out.residual_norm = residual(a, out.x, b);
  return out;
}

SamplingProbabilities leverage_probs_for_columns(const DenseMatrix& a, ProbabilityMethod method,
                                                 std::optional<SketchPlan> plan,
                                                 std::optional<std::uint64_t> seed) {
  require(a.rows() < a.cols(), ErrorCode::ShapeError, "column probabilities need n < d");
  const DenseMatrix at = transpose(a);
  SamplingProbabilities out;
  if (method == ProbabilityMethod::Exact) {
    out.p = exact_leverage(at).normalized;
    out.beta = 1.0;
    return out;
  }
  const SketchPlan resolved = plan ? *plan : make_plan(at.rows(), at.cols(), PlanRequest{});
  out.p = approx_leverage(at, resolved, seed.value_or(0)).report.normalized;
  out.beta = (1.0 - resolved.epsilon) / (1.0 + resolved.epsilon);
  return out;
}

std::vector<double> min_norm_solution(const DenseMatrix& a, std::span<const double> b) {
  return matvec(pseudoinverse(a), b);
}

}  // namespace levsketch
