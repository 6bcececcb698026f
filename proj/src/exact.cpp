#include "levsketch/exact.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "levsketch/error.hpp"

namespace levsketch {

std::string_view to_string(LeverageMethod method) {
  switch (method) {
    case LeverageMethod::Exact: return "exact";
    case LeverageMethod::Sketched: return "sketched";
    case LeverageMethod::MiEstimator: return "mi_estimator";
  }
  return "unknown";
}

LeverageReport make_report(std::vector<double> scores, LeverageMethod method) {
  require(!scores.empty(), ErrorCode::EmptyMatrix, "no scores");
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  require(total > 0.0, ErrorCode::ZeroMatrix, "all leverage scores are zero");
  LeverageReport r;
  r.method = method;
  r.normalized.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) r.normalized[i] = scores[i] / total;
  r.scores = std::move(scores);
  r.coherence = *std::max_element(r.scores.begin(), r.scores.end());
  return r;
}

double coherence(const LeverageReport& report) {
  require(!report.scores.empty(), ErrorCode::InvalidParameter, "empty leverage report");
  return *std::max_element(report.scores.begin(), report.scores.end());
}

LeverageReport exact_leverage(const DenseMatrix& a, double rank_tolerance) {
  const ThinSVD svd = thin_svd(a, rank_tolerance);
  LeverageReport r = make_report(row_norms_squared(svd.U), LeverageMethod::Exact);
  r.rank = svd.rank();
  return r;
}

DenseMatrix exact_cross_leverage(const DenseMatrix& a, std::size_t max_rows,
                                 double rank_tolerance) {
  require(a.rows() <= max_rows, ErrorCode::MatrixTooLargeForDenseGram,
          std::to_string(a.rows()) + " rows exceeds the dense cross-leverage cap of " +
              std::to_string(max_rows));
  const ThinSVD svd = thin_svd(a, rank_tolerance);
  return matmul_nt(svd.U, svd.U);
}

}  // namespace levsketch
