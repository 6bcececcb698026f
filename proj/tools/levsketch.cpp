#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "levsketch/cli.hpp"
#include "levsketch/error.hpp"

namespace {

using levsketch::cli::Command;
using levsketch::cli::RunConfig;

// String-valued flags that are parsed into enums after CLI11 has run.
struct RawFlags {
  std::string format;
  std::string mode = "practical";
  std::string norm = "frobenius";
  std::string pi1 = "srht";
  std::string pi2 = "sparse-jlt";
  std::string orth = "svd";
  std::string output_format = "json";
};

std::uint64_t default_seed() {
  const char* env = std::getenv("LEVSKETCH_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    std::cerr << "levsketch: ignoring unparsable LEVSKETCH_SEED='" << env << "'\n";
    return 0;
  }
}

void add_common(CLI::App* sub, RunConfig& c, RawFlags& raw) {
  sub->add_option("--seed", c.seed, "Random seed (default: $LEVSKETCH_SEED or 0)");
  sub->add_option("--threads", c.threads, "Worker threads; 1 is the bitwise reference")
      ->check(CLI::PositiveNumber);
  sub->add_option("--output,-o", c.output_path, "Output file, '-' for stdout");
  sub->add_option("--output-format", raw.output_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--format", raw.format, "Matrix format: matrix-market, csv or binary");
}

void add_input(CLI::App* sub, RunConfig& c) {
  sub->add_option("input", c.input_path, "Input matrix (.mtx, .csv, .bin)")->required();
}

void add_sketch(CLI::App* sub, RunConfig& c, RawFlags& raw) {
  sub->add_option("--eps", c.epsilon, "Target relative error")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--delta", c.delta, "Failure probability")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--mode", raw.mode, "Sketch sizing: theory or practical")
      ->check(CLI::IsMember({"theory", "practical"}));
  sub->add_option("--r1", c.r1, "First-stage (Hadamard) row count override");
  sub->add_option("--r2", c.r2, "Second-stage (JLT) column count override");
  sub->add_option("--c1", c.c1, "Practical-mode constant for r1 = c1 d ln n");
  sub->add_option("--c2", c.c2, "Practical-mode constant for r2 = c2 ln n / eps^2");
  sub->add_option("--pi1", raw.pi1, "First stage: srht or full-rht")
      ->check(CLI::IsMember({"srht", "full-rht"}));
  sub->add_option("--pi2", raw.pi2, "Second stage: sparse-jlt, gaussian or identity")
      ->check(CLI::IsMember({"sparse-jlt", "gaussian", "identity"}));
  sub->add_option("--orth", raw.orth, "Orthogonalizer: svd or qr")
      ->check(CLI::IsMember({"svd", "qr"}));
  sub->add_option("--retries", c.retries, "Reseeded retries on rank-deficient sketches");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  c.seed = default_seed();
  RawFlags raw;

  CLI::App app{"Fast approximate leverage scores, coherence and leverage-based sampling"};
  app.require_subcommand(1);

  auto* exact = app.add_subcommand("exact", "Exact leverage scores via thin SVD");
  add_common(exact, c, raw);
  add_input(exact, c);

  auto* leverage = app.add_subcommand("leverage", "Sketched leverage scores");
  auto* coherence = app.add_subcommand("coherence", "Coherence (largest leverage score)");
  for (auto* sub : {leverage, coherence}) {
    add_common(sub, c, raw);
    add_input(sub, c);
    add_sketch(sub, c, raw);
    sub->add_option("--method", c.method, "sketched, mi or exact")
        ->check(CLI::IsMember({"sketched", "mi", "exact"}));
  }

  auto* cross = app.add_subcommand("cross", "Large cross-leverage scores");
  add_common(cross, c, raw);
  add_input(cross, c);
  add_sketch(cross, c, raw);
  cross->add_option("--kappa", c.kappa, "Heaviness parameter, a number > 1 or 'nlogn'");
  cross->add_flag("--off-diagonal-only", c.off_diagonal_only, "Drop (i, i) pairs");

  auto* rankk = app.add_subcommand("rankk", "Rank-k leverage scores of a general matrix");
  add_common(rankk, c, raw);
  add_input(rankk, c);
  add_sketch(rankk, c, raw);
  rankk->add_option("--k", c.k, "Target rank")->required();
  rankk->add_option("--q", c.q, "Power-iteration depth override (spectral)");
  rankk->add_option("--norm", raw.norm, "spectral or frobenius")
      ->check(CLI::IsMember({"spectral", "frobenius"}));

  auto* underls = app.add_subcommand("underls", "Leverage-sampled under-constrained least squares");
  add_common(underls, c, raw);
  add_input(underls, c);
  add_sketch(underls, c, raw);
  underls->add_option("--rhs", c.rhs_path, "Right-hand side vector file")->required();
  underls->add_option("--beta", c.beta, "Claimed probability quality in (0, 1]");
  underls->add_option("--r", c.r, "Column sample count override");
  underls->add_option("--method", c.method, "Column probabilities: exact or sketched")
      ->check(CLI::IsMember({"exact", "sketched"}));

  auto* bench = app.add_subcommand("bench", "Exact vs sketched timing and error grid");
  add_common(bench, c, raw);
  bench->add_option("--eps", c.epsilon, "Target relative error")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--mode", raw.mode, "theory or practical")
      ->check(CLI::IsMember({"theory", "practical"}));
  bench->add_option("--n", c.bench_n, "Row counts");
  bench->add_option("--d", c.bench_d, "Column counts");
  bench->add_option("--trials", c.trials, "Seeded trials per cell");

  auto* gen = app.add_subcommand("gen", "Write a seeded test matrix");
  add_common(gen, c, raw);
  gen->add_option("--family", c.family, "gaussian, hadamard or spiked")
      ->check(CLI::IsMember({"gaussian", "hadamard", "spiked"}));
  gen->add_option("--n", c.gen_n, "Rows")->required();
  gen->add_option("--d", c.gen_d, "Columns")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    c.command = levsketch::cli::parse_command(app.get_subcommands().front()->get_name());
    if (c.command == Command::UnderLs && underls->count("--method") == 0) c.method = "exact";
    if (!raw.format.empty()) c.format = levsketch::parse_matrix_format(raw.format);
    c.mode = levsketch::parse_plan_mode(raw.mode);
    c.norm = levsketch::parse_rank_norm(raw.norm);
    c.pi1 = levsketch::parse_sketch_kind(raw.pi1);
    c.pi2 = levsketch::parse_sketch_kind(raw.pi2);
    c.orth = raw.orth == "qr" ? levsketch::OrthSource::Qr : levsketch::OrthSource::Svd;
    c.output_format = levsketch::cli::parse_output_format(raw.output_format);
  } catch (const std::exception& e) {
    std::cerr << "levsketch: error: " << e.what() << '\n';
    return levsketch::cli::kExitError;
  }
  return levsketch::cli::run(c, std::cout, std::cerr);
}
