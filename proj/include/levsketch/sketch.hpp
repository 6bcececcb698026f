#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "levsketch/matrix.hpp"

namespace levsketch {

enum class PlanMode { Theory, Practical };
enum class SketchKind { SRHT, SparseJLT, Gaussian, Identity, FullRHT };
enum class Side { Left, Right };

std::string_view to_string(PlanMode mode);
std::string_view to_string(SketchKind kind);
PlanMode parse_plan_mode(std::string_view s);
SketchKind parse_sketch_kind(std::string_view s);

/// Resolved sketch sizes for the two-stage leverage estimator.
///
/// r1 is the row count of the Hadamard-based first stage, r2 the column count
/// of the second-stage JLT. Theory mode uses the closed-form lower bounds;
/// practical mode uses r1 = ceil(c1 d ln n) and r2 = ceil(c2 ln n / eps^2).
struct SketchPlan {
  double epsilon = 0.5;
  double delta = 0.1;
  std::size_t r1 = 0;
  std::size_t r2 = 0;
  PlanMode mode = PlanMode::Practical;
  double c1 = 20.0;
  double c2 = 12.0;
};

struct PlanRequest {
  double epsilon = 0.5;
  double delta = 0.1;
  PlanMode mode = PlanMode::Practical;
  double c1 = 20.0;
  double c2 = 12.0;
  std::optional<std::size_t> r1_override;
  std::optional<std::size_t> r2_override;
};

/// Plan for an n x d input. r1 is clamped to [d, next_pow2(n)].
SketchPlan make_plan(std::size_t n, std::size_t d, const PlanRequest& request);
void validate_plan(const SketchPlan& plan, std::size_t n, std::size_t d);

/// Seeded, lazily applied random transform. `in_dim` is the dimension that
/// is contracted away, `out_dim` the sketch dimension. In left form the
/// operator is an out_dim x in_dim matrix.
struct SketchOperator {
  SketchKind kind = SketchKind::Identity;
  std::uint64_t seed = 0;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
};

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

/// Normalized Walsh-Hadamard transform H_n x in O(n log n).
std::vector<double> fwht(std::span<const double> x);

/// In-place unnormalized transform across the rows of `a` (rows must be a
/// power of two): every column is replaced by H^ times that column.
void fwht_rows_inplace(DenseMatrix& a);

/// Smallest r with r >= (12 ln n + 6 ln(1/delta)) / eps^2.
std::size_t jlt_dim(std::uint64_t n_points, double epsilon, double delta);

/// Smallest r with r >= 14^2 d ln(40nd)/eps^2 * ln(30^2 d ln(40nd)/eps^2), capped at n.
std::size_t fjlt_dim(std::size_t n, std::size_t d, double epsilon);

/// Row indices (into the padded input) that an SRHT operator keeps, ascending.
std::vector<std::size_t> srht_selected_rows(const SketchOperator& op);
/// The +-1 diagonal of D, one per padded row.
std::vector<double> srht_signs(const SketchOperator& op);

/// sqrt(n_pad / r) S^T H D A_pad. FullRHT keeps all n_pad rows with scale 1.
DenseMatrix apply_srht(const SketchOperator& op, const DenseMatrix& a);
/// Adjoint of apply_srht, truncated back to in_dim rows.
DenseMatrix apply_srht_transpose(const SketchOperator& op, const DenseMatrix& y);

/// Three-point law: +-sqrt(3/out_dim) with probability 1/6 each, else 0.
DenseMatrix apply_sparse_jlt(const SketchOperator& op, const DenseMatrix& x, Side side);
/// Unscaled i.i.d. N(0, 1) entries.
DenseMatrix apply_gaussian(const SketchOperator& op, const DenseMatrix& x, Side side);

/// Dispatches on op.kind. Left: op * x (x.rows() == in_dim). Right: x * op^T
/// in left form (x.cols() == in_dim). SRHT kinds support the left side only.
DenseMatrix apply(const SketchOperator& op, const DenseMatrix& x, Side side);

/// Explicit out_dim x in_dim matrix of the operator (tests and diagnostics).
DenseMatrix to_dense(const SketchOperator& op);

}  // namespace levsketch
