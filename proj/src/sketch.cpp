#include "levsketch/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "levsketch/error.hpp"
#include "levsketch/parallel.hpp"
#include "levsketch/philox.hpp"

namespace levsketch {

namespace {

// Substream identifiers derived from an operator seed.
constexpr std::uint64_t kSignStream = 0x5349474eull;    // "SIGN"
constexpr std::uint64_t kSelectStream = 0x53454c43ull;  // "SELC"
constexpr std::uint64_t kJltStream = 0x4a4c5420ull;     // "JLT "
constexpr std::uint64_t kGaussStream = 0x47415553ull;   // "GAUS"

void check_epsilon(double epsilon) {
  require(epsilon > 0.0 && epsilon <= 0.5, ErrorCode::InvalidParameter,
          "epsilon must lie in (0, 1/2]");
}

void check_left(const SketchOperator& op, const DenseMatrix& x, Side side) {
  const std::size_t contracted = side == Side::Left ? x.rows() : x.cols();
  require(contracted == op.in_dim, ErrorCode::DimensionMismatch,
          "sketch in_dim " + std::to_string(op.in_dim) + " does not match input dimension " +
              std::to_string(contracted));
}

// Left-form entry (i, j) of the three-point operator.
double sparse_jlt_entry(const RandomStream& rs, const SketchOperator& op, std::size_t i,
                        std::size_t j, double magnitude) {
  const std::uint64_t u = rs.bits(static_cast<std::uint64_t>(i) * op.in_dim + j) % 6;
  if (u == 0) return magnitude;
  if (u == 1) return -magnitude;
  return 0.0;
}

// Materializes the left-form matrix with a per-entry generator.
template <class Gen>
DenseMatrix materialize(const SketchOperator& op, Gen gen) {
  DenseMatrix m(op.out_dim, op.in_dim);
  parallel_for(op.out_dim, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = 0; j < op.in_dim; ++j) m(i, j) = gen(i, j);
  });
  return m;
}

DenseMatrix apply_dense(const DenseMatrix& left_form, const DenseMatrix& x, Side side) {
  if (side == Side::Left) return matmul(left_form, x);
  return matmul_nt(x, left_form);
}

}  // namespace

std::string_view to_string(PlanMode mode) {
  return mode == PlanMode::Theory ? "theory" : "practical";
}

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::SRHT: return "srht";
    case SketchKind::SparseJLT: return "sparse-jlt";
    case SketchKind::Gaussian: return "gaussian";
    case SketchKind::Identity: return "identity";
    case SketchKind::FullRHT: return "full-rht";
  }
  return "unknown";
}

PlanMode parse_plan_mode(std::string_view s) {
  if (s == "theory") return PlanMode::Theory;
  if (s == "practical") return PlanMode::Practical;
  raise(ErrorCode::InvalidParameter, "unknown plan mode '" + std::string(s) + "'");
}

SketchKind parse_sketch_kind(std::string_view s) {
  for (auto k : {SketchKind::SRHT, SketchKind::SparseJLT, SketchKind::Gaussian,
                 SketchKind::Identity, SketchKind::FullRHT})
    if (to_string(k) == s) return k;
  raise(ErrorCode::InvalidParameter, "unknown sketch kind '" + std::string(s) + "'");
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> fwht(std::span<const double> x) {
  require(is_power_of_two(x.size()), ErrorCode::NotPowerOfTwo,
          "fwht length " + std::to_string(x.size()) + " is not a power of two");
  std::vector<double> y(x.begin(), x.end());
  const std::size_t n = y.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = y[j];
        const double b = y[j + h];
        y[j] = a + b;
        y[j + h] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& v : y) v *= scale;
  return y;
}

void fwht_rows_inplace(DenseMatrix& a) {
  require(is_power_of_two(a.rows()), ErrorCode::NotPowerOfTwo, "row count is not a power of two");
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  // Butterflies on whole rows; columns are independent so workers split them.
  parallel_for(m, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t h = 1; h < n; h <<= 1) {
      for (std::size_t i = 0; i < n; i += 2 * h) {
        for (std::size_t j = i; j < i + h; ++j) {
          double* top = a.row(j).data();
          double* bot = a.row(j + h).data();
          for (std::size_t c = c0; c < c1; ++c) {
            const double x = top[c];
            const double y = bot[c];
            top[c] = x + y;
            bot[c] = x - y;
          }
        }
      }
    }
  }, 16);
}

std::size_t jlt_dim(std::uint64_t n_points, double epsilon, double delta) {
  require(n_points >= 1, ErrorCode::InvalidParameter, "n_points must be >= 1");
  check_epsilon(epsilon);
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidParameter, "delta must lie in (0, 1)");
  const double bound =
      (12.0 * std::log(static_cast<double>(n_points)) + 6.0 * std::log(1.0 / delta)) /
      (epsilon * epsilon);
  return static_cast<std::size_t>(std::ceil(bound));
}

std::size_t fjlt_dim(std::size_t n, std::size_t d, double epsilon) {
  require(d >= 1 && n >= d, ErrorCode::InvalidParameter, "fjlt_dim needs n >= d >= 1");
  check_epsilon(epsilon);
  const double nd = static_cast<double>(n) * static_cast<double>(d);
  const double l = static_cast<double>(d) * std::log(40.0 * nd);
  const double e2 = epsilon * epsilon;
  const double bound = (196.0 * l / e2) * std::log(900.0 * l / e2);
  const double r = std::ceil(bound);
  return r >= static_cast<double>(n) ? n : static_cast<std::size_t>(r);
}

SketchPlan make_plan(std::size_t n, std::size_t d, const PlanRequest& request) {
  check_epsilon(request.epsilon);
  require(request.delta > 0.0 && request.delta < 1.0, ErrorCode::InvalidParameter,
          "delta must lie in (0, 1)");
  require(n > d && d >= 1, ErrorCode::ShapeError, "sketch plans need n > d >= 1");
  SketchPlan plan;
  plan.epsilon = request.epsilon;
  plan.delta = request.delta;
  plan.mode = request.mode;
  plan.c1 = request.c1;
  plan.c2 = request.c2;
  const double ln_n = std::log(static_cast<double>(n));
  if (request.mode == PlanMode::Theory) {
    plan.r1 = fjlt_dim(n, d, request.epsilon);
    plan.r2 = jlt_dim(static_cast<std::uint64_t>(n) * n, request.epsilon, request.delta);
  } else {
    require(request.c1 > 0.0 && request.c2 > 0.0, ErrorCode::InvalidParameter,
            "practical multipliers must be positive");
    plan.r1 = static_cast<std::size_t>(std::ceil(request.c1 * static_cast<double>(d) * ln_n));
    plan.r2 = static_cast<std::size_t>(
        std::ceil(request.c2 * ln_n / (request.epsilon * request.epsilon)));
  }
  if (request.r1_override) plan.r1 = *request.r1_override;
  if (request.r2_override) plan.r2 = *request.r2_override;
  plan.r1 = std::clamp(plan.r1, d, next_power_of_two(n));
  plan.r2 = std::max<std::size_t>(plan.r2, 1);
  return plan;
}

void validate_plan(const SketchPlan& plan, std::size_t n, std::size_t d) {
  check_epsilon(plan.epsilon);
  require(plan.delta > 0.0 && plan.delta < 1.0, ErrorCode::InvalidParameter,
          "delta must lie in (0, 1)");
  require(plan.r1 >= d && plan.r1 <= next_power_of_two(n), ErrorCode::InvalidParameter,
          "r1 must lie in [d, next_pow2(n)]");
  require(plan.r2 >= 1, ErrorCode::InvalidParameter, "r2 must be >= 1");
}

std::vector<double> srht_signs(const SketchOperator& op) {
  const std::size_t n_pad = next_power_of_two(op.in_dim);
  const RandomStream rs(op.seed, kSignStream);
  std::vector<double> signs(n_pad);
  for (std::size_t i = 0; i < n_pad; ++i) signs[i] = (rs.bits(i) & 1u) ? -1.0 : 1.0;
  return signs;
}

std::vector<std::size_t> srht_selected_rows(const SketchOperator& op) {
  const std::size_t n_pad = next_power_of_two(op.in_dim);
  std::vector<std::size_t> idx(n_pad);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (op.kind == SketchKind::FullRHT) return idx;
  require(op.out_dim >= 1 && op.out_dim <= n_pad, ErrorCode::DimensionMismatch,
          "SRHT out_dim must lie in [1, n_pad]");
  // Partial Fisher-Yates: uniform r-subset without replacement.
  const RandomStream rs(op.seed, kSelectStream);
  std::uint64_t pos = 0;
  for (std::size_t t = 0; t < op.out_dim; ++t) {
    const auto j = t + static_cast<std::size_t>(rs.below(n_pad - t, pos));
    std::swap(idx[t], idx[j]);
  }
  idx.resize(op.out_dim);
  std::sort(idx.begin(), idx.end());
  return idx;
}

DenseMatrix apply_srht(const SketchOperator& op, const DenseMatrix& a) {
  require(op.kind == SketchKind::SRHT || op.kind == SketchKind::FullRHT,
          ErrorCode::InvalidParameter, "apply_srht needs an SRHT or FullRHT operator");
  check_left(op, a, Side::Left);
  const std::size_t n_pad = next_power_of_two(op.in_dim);
  const auto signs = srht_signs(op);
  DenseMatrix work(n_pad, a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto src = a.row(i);
    auto dst = work.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = signs[i] * src[j];
  }
  // TODO: pruned transform computing only the r sampled outputs in O(n log r).
  fwht_rows_inplace(work);
  const auto rows = srht_selected_rows(op);
  // Unnormalized H^ = sqrt(n_pad) H, so sqrt(n_pad / r) H = H^ / sqrt(r).
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows.size()));
  DenseMatrix out(rows.size(), a.cols());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto src = work.row(rows[t]);
    auto dst = out.row(t);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = scale * src[j];
  }
  return out;
}

DenseMatrix apply_srht_transpose(const SketchOperator& op, const DenseMatrix& y) {
  require(op.kind == SketchKind::SRHT || op.kind == SketchKind::FullRHT,
          ErrorCode::InvalidParameter, "apply_srht_transpose needs an SRHT or FullRHT operator");
  const auto rows = srht_selected_rows(op);
  require(y.rows() == rows.size(), ErrorCode::DimensionMismatch, "SRHT adjoint input rows");
  const std::size_t n_pad = next_power_of_two(op.in_dim);
  DenseMatrix work(n_pad, y.cols());
  for (std::size_t t = 0; t < rows.size(); ++t)
    std::copy(y.row(t).begin(), y.row(t).end(), work.row(rows[t]).begin());
  fwht_rows_inplace(work);
  const auto signs = srht_signs(op);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows.size()));
  DenseMatrix out(op.in_dim, y.cols());
  for (std::size_t i = 0; i < op.in_dim; ++i) {
    const auto src = work.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = scale * signs[i] * src[j];
  }
  return out;
}

DenseMatrix apply_sparse_jlt(const SketchOperator& op, const DenseMatrix& x, Side side) {
  require(op.kind == SketchKind::SparseJLT, ErrorCode::InvalidParameter,
          "apply_sparse_jlt needs a SparseJLT operator");
  check_left(op, x, side);
  require(op.out_dim >= 1, ErrorCode::DimensionMismatch, "out_dim must be >= 1");
  return apply_dense(to_dense(op), x, side);
}

DenseMatrix apply_gaussian(const SketchOperator& op, const DenseMatrix& x, Side side) {
  require(op.kind == SketchKind::Gaussian, ErrorCode::InvalidParameter,
          "apply_gaussian needs a Gaussian operator");
  check_left(op, x, side);
  require(op.out_dim >= 1, ErrorCode::DimensionMismatch, "out_dim must be >= 1");
  return apply_dense(to_dense(op), x, side);
}

DenseMatrix apply(const SketchOperator& op, const DenseMatrix& x, Side side) {
  switch (op.kind) {
    case SketchKind::SRHT:
    case SketchKind::FullRHT:
      require(side == Side::Left, ErrorCode::InvalidParameter,
              "Hadamard sketches are applied from the left only");
      return apply_srht(op, x);
    case SketchKind::SparseJLT: return apply_sparse_jlt(op, x, side);
    case SketchKind::Gaussian: return apply_gaussian(op, x, side);
    case SketchKind::Identity:
      check_left(op, x, side);
      require(op.out_dim == op.in_dim, ErrorCode::DimensionMismatch,
              "identity sketch needs out_dim == in_dim");
      return x;
  }
  raise(ErrorCode::InvalidParameter, "unknown sketch kind");
}

DenseMatrix to_dense(const SketchOperator& op) {
  switch (op.kind) {
    case SketchKind::SparseJLT: {
      const RandomStream rs(op.seed, kJltStream);
      const double magnitude = std::sqrt(3.0 / static_cast<double>(op.out_dim));
      return materialize(op, [&](std::size_t i, std::size_t j) {
        return sparse_jlt_entry(rs, op, i, j, magnitude);
      });
    }
    case SketchKind::Gaussian: {
      const RandomStream rs(op.seed, kGaussStream);
      return materialize(op, [&](std::size_t i, std::size_t j) {
        return rs.normal(static_cast<std::uint64_t>(i) * op.in_dim + j);
      });
    }
    case SketchKind::Identity: return DenseMatrix::identity(op.in_dim);
    case SketchKind::SRHT:
    case SketchKind::FullRHT: return apply_srht(op, DenseMatrix::identity(op.in_dim));
  }
  raise(ErrorCode::InvalidParameter, "unknown sketch kind");
}

}  // namespace levsketch
