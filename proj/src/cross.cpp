#include "levsketch/cross.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "levsketch/error.hpp"

namespace levsketch {

namespace {

double gram_frobenius_sq(const DenseMatrix& x) {
  const DenseMatrix g = matmul_tn(x, x);
  double s = 0.0;
  for (double v : g.data()) s += v * v;
  return s;
}

void sort_pairs(std::vector<HeavyPair>& pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const HeavyPair& a, const HeavyPair& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
}

}  // namespace

HeavyPairSet heavy_pairs(const DenseMatrix& x, double kappa) {
  require(std::isfinite(kappa) && kappa > 1.0, ErrorCode::InvalidKappa, "kappa must exceed 1");
  const std::size_t n = x.rows();
  HeavyPairSet out;
  out.kappa = kappa;
  out.gram_fro_sq = n == 0 ? 0.0 : gram_frobenius_sq(x);
  require(out.gram_fro_sq > 0.0, ErrorCode::ZeroMatrix, "||X^T X||_F is zero");
  out.threshold = out.gram_fro_sq / kappa;

  const std::vector<double> norms = row_norms_squared(x);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });

  // The norm test is loosened by a relative 1e-12 so rounding can never push
  // a heavy pair outside the candidate set.
  const double norm_cut = out.threshold * (1.0 - 1e-12);
  std::size_t lo = 0;
  for (std::size_t hi = n; hi-- > 0;) {
    const double top = norms[order[hi]];
    while (lo <= hi && top * norms[order[lo]] < norm_cut) ++lo;
    if (lo > hi) break;
    for (std::size_t j = lo; j <= hi; ++j) {
      const std::size_t a = order[hi];
      const std::size_t b = order[j];
      const double c = dot(x.row(a), x.row(b));
      const double c_sq = c * c;
      ++out.candidates_checked;
      if (c_sq >= out.threshold) out.pairs.push_back({std::min(a, b), std::max(a, b), c_sq});
    }
  }
  sort_pairs(out.pairs);

  const double bound = std::ceil(kappa * static_cast<double>(x.cols()));
  if (static_cast<double>(out.pairs.size()) > bound)
    throw std::logic_error("heavy pair count " + std::to_string(out.pairs.size()) +
                           " exceeds kappa * r = " + std::to_string(bound));
  return out;
}

CrossLeverageResult approx_cross_leverage(const DenseMatrix& a, const SketchPlan& plan,
                                          double kappa, std::uint64_t seed,
                                          const LeverageOptions& options) {
  require(std::isfinite(kappa) && kappa > 1.0, ErrorCode::InvalidKappa, "kappa must exceed 1");
  CrossLeverageResult out;
  out.kappa = kappa;
  out.leverage = approx_leverage(a, plan, seed, options);
  const auto d = static_cast<double>(out.leverage.basis.rank);
  out.search_kappa = kappa * (1.0 + 30.0 * d * plan.epsilon);

  HeavyPairSet search = heavy_pairs(out.leverage.basis.omega, out.search_kappa);
  out.search_hits = search.pairs.size();

  HeavyPairSet& final_set = out.pairs;
  final_set.gram_fro_sq = search.gram_fro_sq;
  final_set.threshold = d / kappa;
  final_set.kappa = kappa * search.gram_fro_sq / d;
  final_set.candidates_checked = search.candidates_checked;
  for (const HeavyPair& p : search.pairs)
    if (p.c_sq >= final_set.threshold) final_set.pairs.push_back(p);
  return out;
}

HeavyPairSet off_diagonal(HeavyPairSet set) {
  std::erase_if(set.pairs, [](const HeavyPair& p) { return p.i == p.j; });
  return set;
}

}  // namespace levsketch
