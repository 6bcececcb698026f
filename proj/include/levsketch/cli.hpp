#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levsketch/io.hpp"
#include "levsketch/leverage.hpp"
#include "levsketch/rank_k.hpp"
#include "levsketch/sketch.hpp"

namespace levsketch::cli {

enum class Command { Leverage, Exact, Coherence, Cross, RankK, UnderLs, Bench, Gen };
enum class OutputFormat { Json, Csv };

std::string_view to_string(Command command);
Command parse_command(std::string_view s);
OutputFormat parse_output_format(std::string_view s);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRetriesExhausted = 2;

struct RunConfig {
  Command command = Command::Leverage;
  std::string input_path;
  std::optional<MatrixFormat> format;  // inferred from the extension when unset
  double epsilon = 0.5;
  double delta = 0.1;
  std::uint64_t seed = 0;
  PlanMode mode = PlanMode::Practical;
  double c1 = 20.0;
  double c2 = 12.0;
  std::optional<std::size_t> r1;
  std::optional<std::size_t> r2;
  std::string kappa = "nlogn";  // number or "nlogn"
  std::size_t k = 2;
  std::optional<std::size_t> q;
  RankNorm norm = RankNorm::Frobenius;
  std::optional<double> beta;     // underls: claimed probability quality
  std::optional<std::size_t> r;   // underls: sample count override
  std::string method = "sketched";  // leverage/coherence: sketched|mi|exact; underls probs: exact|sketched
  std::string rhs_path;
  bool off_diagonal_only = false;
  int threads = 1;
  int retries = 3;
  SketchKind pi1 = SketchKind::SRHT;
  SketchKind pi2 = SketchKind::SparseJLT;
  OrthSource orth = OrthSource::Svd;
  std::string output_path = "-";
  OutputFormat output_format = OutputFormat::Json;
  // bench grid
  std::vector<std::size_t> bench_n = {1024, 2048, 4096, 8192, 16384};
  std::vector<std::size_t> bench_d = {8, 16, 32, 64};
  std::size_t trials = 3;
  // gen
  std::string family = "gaussian";
  std::size_t gen_n = 1024;
  std::size_t gen_d = 16;
};

struct BenchRow {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t trials = 0;
  double exact_ms = 0.0;     // mean over trials
  double sketched_ms = 0.0;  // mean over trials
  double max_rel_err = 0.0;  // max over rows and trials
  double frac_within_eps = 0.0;
};

/// Seeded (n, d) grid of exact vs sketched leverage timings and errors.
std::vector<BenchRow> bench(const RunConfig& config);

/// Executes one command and writes its output document. Diagnostics go to
/// `err`; the document goes to config.output_path, or `out` when that is "-".
/// Returns kExitOk, kExitError, or kExitRetriesExhausted.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace levsketch::cli
