#include "levsketch/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "levsketch/cross.hpp"
#include "levsketch/error.hpp"
#include "levsketch/exact.hpp"
#include "levsketch/generators.hpp"
#include "levsketch/parallel.hpp"
#include "levsketch/philox.hpp"
#include "levsketch/under_ls.hpp"

namespace levsketch::cli {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string num(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

// One command's output before serialization. `table` is the CSV body:
// a header row followed by data rows.
struct Document {
  json params = json::object();
  json timings = json::object();
  json result = json::object();
  std::vector<std::vector<std::string>> table;
};

void add_phase_timings(Document& doc, const PhaseTimings& t) {
  doc.timings["sketch"] = t.sketch_ms;
  doc.timings["factor"] = t.factor_ms;
  doc.timings["product"] = t.product_ms;
  doc.timings["norms"] = t.norms_ms;
}

void add_plan(Document& doc, const SketchPlan& plan) {
  doc.params["r1"] = plan.r1;
  doc.params["r2"] = plan.r2;
  doc.params["c1"] = plan.c1;
  doc.params["c2"] = plan.c2;
  doc.params["mode"] = std::string(to_string(plan.mode));
}

void scores_table(Document& doc, const std::vector<double>& scores, const char* column) {
  doc.table.push_back({"index", column});
  for (std::size_t i = 0; i < scores.size(); ++i) doc.table.push_back({std::to_string(i), num(scores[i])});
}

SketchPlan resolve_plan(const RunConfig& c, std::size_t n, std::size_t d) {
  PlanRequest req;
  req.epsilon = c.epsilon;
  req.delta = c.delta;
  req.mode = c.mode;
  req.c1 = c.c1;
  req.c2 = c.c2;
  req.r1_override = c.r1;
  req.r2_override = c.r2;
  return make_plan(n, d, req);
}

LeverageOptions resolve_options(const RunConfig& c) {
  LeverageOptions opts;
  opts.first_stage = c.pi1;
  opts.second_stage = c.pi2;
  opts.orthogonalizer = c.orth;
  return opts;
}

double resolve_kappa(const std::string& text, std::size_t n) {
  if (text == "nlogn") return static_cast<double>(n) * std::log(static_cast<double>(n));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == text.size() && used > 0, ErrorCode::InvalidParameter,
          "--kappa must be a number or 'nlogn', got '" + text + "'");
  return v;
}

void add_stage_params(Document& doc, const RunConfig& c) {
  doc.params["pi1"] = std::string(to_string(c.pi1));
  doc.params["pi2"] = std::string(to_string(c.pi2));
  doc.params["orthogonalizer"] = c.orth == OrthSource::Svd ? "svd" : "qr";
}

LeverageReport leverage_by_method(const RunConfig& c, const DenseMatrix& a, std::uint64_t seed,
                                  Document& doc) {
  doc.params["method"] = c.method;
  if (c.method == "exact") {
    const auto t0 = Clock::now();
    LeverageReport rep = exact_leverage(a);
    doc.timings["factor"] = elapsed_ms(t0);
    return rep;
  }
  if (c.method == "mi") {
    doc.params["r1"] = mi_sketch_rows(a.rows(), a.cols());
    const auto t0 = Clock::now();
    LeverageReport rep = mi_estimate(a, seed);
    doc.timings["total"] = elapsed_ms(t0);
    return rep;
  }
  require(c.method == "sketched", ErrorCode::InvalidParameter,
          "--method must be sketched, mi or exact, got '" + c.method + "'");
  const SketchPlan plan = resolve_plan(c, a.rows(), a.cols());
  add_stage_params(doc, c);
  ApproxLeverageResult res = approx_leverage(a, plan, seed, resolve_options(c));
  add_plan(doc, *res.report.params);
  add_phase_timings(doc, res.timings);
  return std::move(res.report);
}

void cmd_exact(const RunConfig&, const DenseMatrix& a, std::uint64_t, Document& doc) {
  const auto t0 = Clock::now();
  const LeverageReport rep = exact_leverage(a);
  doc.timings["factor"] = elapsed_ms(t0);
  doc.result["scores"] = rep.scores;
  doc.result["coherence"] = rep.coherence;
  doc.result["rank"] = rep.rank;
  scores_table(doc, rep.scores, "score");
}

void cmd_leverage(const RunConfig& c, const DenseMatrix& a, std::uint64_t seed, Document& doc) {
  const LeverageReport rep = leverage_by_method(c, a, seed, doc);
  doc.result["scores"] = rep.scores;
  doc.result["coherence"] = rep.coherence;
  doc.result["rank"] = rep.rank;
  scores_table(doc, rep.scores, "score");
}

void cmd_coherence(const RunConfig& c, const DenseMatrix& a, std::uint64_t seed, Document& doc) {
  const LeverageReport rep = leverage_by_method(c, a, seed, doc);
  const auto it = std::max_element(rep.scores.begin(), rep.scores.end());
  const auto argmax = static_cast<std::size_t>(it - rep.scores.begin());
  doc.result["coherence"] = rep.coherence;
  doc.result["argmax"] = argmax;
  doc.table = {{"coherence", "argmax"}, {num(rep.coherence), std::to_string(argmax)}};
}

void cmd_cross(const RunConfig& c, const DenseMatrix& a, std::uint64_t seed, Document& doc) {
  const double kappa = resolve_kappa(c.kappa, a.rows());
  const SketchPlan plan = resolve_plan(c, a.rows(), a.cols());
  add_stage_params(doc, c);
  doc.params["kappa"] = kappa;
  doc.params["kappa_input"] = c.kappa;
  doc.params["off_diagonal_only"] = c.off_diagonal_only;
  CrossLeverageResult res = approx_cross_leverage(a, plan, kappa, seed, resolve_options(c));
  add_plan(doc, *res.leverage.report.params);
  add_phase_timings(doc, res.leverage.timings);
  doc.params["search_kappa"] = res.search_kappa;

  const HeavyPairSet set = c.off_diagonal_only ? off_diagonal(res.pairs) : res.pairs;
  json pairs = json::array();
  doc.table.push_back({"i", "j", "c_sq"});
  for (const HeavyPair& p : set.pairs) {
    pairs.push_back(json::array({p.i, p.j, p.c_sq}));
    doc.table.push_back({std::to_string(p.i), std::to_string(p.j), num(p.c_sq)});
  }
  doc.result["pairs"] = std::move(pairs);
  doc.result["threshold"] = set.threshold;
  doc.result["kappa_effective"] = set.kappa;
  doc.result["gram_fro_sq"] = set.gram_fro_sq;
  doc.result["search_hits"] = res.search_hits;
  doc.result["candidates_checked"] = set.candidates_checked;
}

void cmd_rankk(const RunConfig& c, const DenseMatrix& a, std::uint64_t seed, Document& doc) {
  const auto t0 = Clock::now();
  NormalizedLevReport rep;
  if (c.norm == RankNorm::Spectral) {
    RankKOptions opts;
    opts.q_override = c.q;
    opts.inner_mode = c.mode;
    rep = spectral_rankk(a, c.k, c.epsilon, seed, opts);
  } else {
    rep = frobenius_rankk(a, c.k, c.epsilon, seed);
  }
  doc.timings["total"] = elapsed_ms(t0);
  doc.params["k"] = rep.k;
  doc.params["norm"] = std::string(to_string(rep.norm));
  doc.params["q"] = rep.plan.q;
  doc.params["r"] = rep.plan.r;
  doc.params["mode"] = std::string(to_string(c.mode));
  doc.result["p_hat"] = rep.p_hat;
  doc.result["beta"] = rep.beta_claim;
  scores_table(doc, rep.p_hat, "p_hat");
}

std::vector<double> load_vector(const std::string& path) {
  const DenseMatrix m = load_matrix(path, format_from_extension(path));
  require(m.rows() == 1 || m.cols() == 1, ErrorCode::ShapeError,
          "right-hand side must be a single row or column");
  return {m.data().begin(), m.data().end()};
}

void cmd_underls(const RunConfig& c, const DenseMatrix& a, std::uint64_t seed, Document& doc) {
  require(!c.rhs_path.empty(), ErrorCode::InvalidParameter, "underls needs --rhs");
  const std::vector<double> b = load_vector(c.rhs_path);
  const std::string method = c.method == "sketched" || c.method == "exact" ? c.method : "";
  require(!method.empty(), ErrorCode::InvalidParameter,
          "underls --method must be exact or sketched, got '" + c.method + "'");

  auto t0 = Clock::now();
  SamplingProbabilities probs;
  if (method == "exact") {
    probs = leverage_probs_for_columns(a, ProbabilityMethod::Exact);
  } else {
    const SketchPlan plan = resolve_plan(c, a.cols(), a.rows());
    add_plan(doc, plan);
    probs = leverage_probs_for_columns(a, ProbabilityMethod::Sketched, plan, seed);
  }
  if (c.beta) probs.beta = *c.beta;
  doc.timings["probabilities"] = elapsed_ms(t0);

  t0 = Clock::now();
  const UnderLsSolution sol = underls_solve(a, b, probs, c.epsilon, c.delta, seed, c.r);
  doc.timings["solve"] = elapsed_ms(t0);
  doc.params["method"] = method;
  doc.params["beta"] = probs.beta;
  doc.params["r"] = sol.r;
  doc.params["rhs"] = c.rhs_path;
  doc.result["x"] = sol.x;
  doc.result["residual_norm"] = sol.residual_norm;
  scores_table(doc, sol.x, "x");
}

void write_document(const RunConfig& c, const Document& doc, std::uint64_t seed,
                    std::ostream& out) {
  if (c.output_format == OutputFormat::Json) {
    json root;
    root["params"] = doc.params;
    root["seed"] = seed;
    root["timings_ms"] = doc.timings;
    root["result"] = doc.result;
    out << root.dump(2) << '\n';
    return;
  }
  out << "# params " << doc.params.dump() << '\n';
  out << "# seed " << seed << '\n';
  out << "# timings_ms " << doc.timings.dump() << '\n';
  for (const auto& row : doc.table) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void emit(const RunConfig& c, const Document& doc, std::uint64_t seed, std::ostream& out) {
  if (c.output_path.empty() || c.output_path == "-") {
    write_document(c, doc, seed, out);
    return;
  }
  std::ofstream file(c.output_path);
  require(static_cast<bool>(file), ErrorCode::IoError, "cannot write '" + c.output_path + "'");
  write_document(c, doc, seed, file);
}

void bench_document(const RunConfig& c, Document& doc) {
  doc.params["epsilon"] = c.epsilon;
  doc.params["mode"] = std::string(to_string(c.mode));
  doc.params["c1"] = c.c1;
  doc.params["c2"] = c.c2;
  doc.params["trials"] = c.trials;
  doc.params["n"] = c.bench_n;
  doc.params["d"] = c.bench_d;
  const std::vector<BenchRow> rows = bench(c);
  json table = json::array();
  json errors = json::array();
  doc.table.push_back({"n", "d", "trials", "exact_ms", "sketched_ms", "max_rel_err", "frac_within_eps"});
  for (const BenchRow& r : rows) {
    // Timing columns live under timings_ms; the result keeps the seeded columns.
    table.push_back({{"n", r.n}, {"d", r.d}, {"exact_ms", r.exact_ms}, {"sketched_ms", r.sketched_ms}});
    errors.push_back({{"n", r.n}, {"d", r.d}, {"trials", r.trials}, {"max_rel_err", r.max_rel_err},
                      {"frac_within_eps", r.frac_within_eps}});
    doc.table.push_back({std::to_string(r.n), std::to_string(r.d), std::to_string(r.trials),
                         num(r.exact_ms), num(r.sketched_ms), num(r.max_rel_err),
                         num(r.frac_within_eps)});
  }
  doc.timings["cells"] = std::move(table);
  doc.result["cells"] = std::move(errors);
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Leverage: return "leverage";
    case Command::Exact: return "exact";
    case Command::Coherence: return "coherence";
    case Command::Cross: return "cross";
    case Command::RankK: return "rankk";
    case Command::UnderLs: return "underls";
    case Command::Bench: return "bench";
    case Command::Gen: return "gen";
  }
  return "unknown";
}

Command parse_command(std::string_view s) {
  for (Command c : {Command::Leverage, Command::Exact, Command::Coherence, Command::Cross,
                    Command::RankK, Command::UnderLs, Command::Bench, Command::Gen})
    if (to_string(c) == s) return c;
  raise(ErrorCode::InvalidParameter, "unknown command '" + std::string(s) + "'");
}

OutputFormat parse_output_format(std::string_view s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  raise(ErrorCode::InvalidParameter, "unknown output format '" + std::string(s) + "'");
}

std::vector<BenchRow> bench(const RunConfig& c) {
  std::vector<BenchRow> rows;
  for (std::size_t n : c.bench_n) {
    for (std::size_t d : c.bench_d) {
      if (d >= n) continue;
      BenchRow row{n, d, c.trials};
      std::size_t within = 0;
      for (std::size_t t = 0; t < c.trials; ++t) {
        const std::uint64_t cell = mix64(c.seed ^ mix64((n << 20) ^ (d << 8) ^ t));
        const DenseMatrix a = gaussian_matrix(n, d, cell);

        auto t0 = Clock::now();
        const LeverageReport exact = exact_leverage(a);
        row.exact_ms += elapsed_ms(t0);

        const SketchPlan plan = resolve_plan(c, n, d);
        t0 = Clock::now();
        std::optional<ApproxLeverageResult> approx;
        for (int attempt = 0; !approx; ++attempt) {
          try {
            approx = approx_leverage(a, plan, cell + static_cast<std::uint64_t>(attempt));
          } catch (const Error& e) {
            if (e.code() != ErrorCode::RankDeficient || attempt >= c.retries) throw;
          }
        }
        row.sketched_ms += elapsed_ms(t0);

        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if (exact.scores[i] > 0.0)
            worst = std::max(worst, std::abs(approx->report.scores[i] - exact.scores[i]) /
                                        exact.scores[i]);
        row.max_rel_err = std::max(row.max_rel_err, worst);
        if (worst <= c.epsilon) ++within;
      }
      if (c.trials > 0) {
        row.exact_ms /= static_cast<double>(c.trials);
        row.sketched_ms /= static_cast<double>(c.trials);
        row.frac_within_eps = static_cast<double>(within) / static_cast<double>(c.trials);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    require(c.threads >= 1, ErrorCode::InvalidParameter, "--threads must be at least 1");
    require(c.retries >= 0, ErrorCode::InvalidParameter, "--retries must be nonnegative");
    set_num_threads(c.threads);

    if (c.command == Command::Gen) {
      require(!c.output_path.empty() && c.output_path != "-", ErrorCode::InvalidParameter,
              "gen needs --output <file>");
      const DenseMatrix a = generate_matrix(c.family, c.gen_n, c.gen_d, c.seed);
      save_matrix(c.output_path, a, c.format ? *c.format : format_from_extension(c.output_path));
      return kExitOk;
    }

    Document doc;
    doc.params["command"] = std::string(to_string(c.command));
    doc.params["threads"] = c.threads;
    doc.params["retries"] = c.retries;
    if (c.command == Command::Bench) {
      bench_document(c, doc);
      emit(c, doc, c.seed, out);
      return kExitOk;
    }

    require(!c.input_path.empty(), ErrorCode::InvalidParameter, "missing input matrix path");
    const MatrixFormat format = c.format ? *c.format : format_from_extension(c.input_path);
    const auto t0 = Clock::now();
    const DenseMatrix a = load_matrix(c.input_path, format);
    const double load_ms = elapsed_ms(t0);
    require(!a.empty(), ErrorCode::EmptyMatrix, "input matrix is empty");

    doc.params["input"] = c.input_path;
    doc.params["format"] = std::string(to_string(format));
    doc.params["n"] = a.rows();
    doc.params["d"] = a.cols();
    doc.params["epsilon"] = c.epsilon;
    doc.params["delta"] = c.delta;

    std::function<void(const RunConfig&, const DenseMatrix&, std::uint64_t, Document&)> handler;
    switch (c.command) {
      case Command::Exact: handler = cmd_exact; break;
      case Command::Leverage: handler = cmd_leverage; break;
      case Command::Coherence: handler = cmd_coherence; break;
      case Command::Cross: handler = cmd_cross; break;
      case Command::RankK: handler = cmd_rankk; break;
      case Command::UnderLs: handler = cmd_underls; break;
      default: raise(ErrorCode::InvalidParameter, "unhandled command");
    }

    // Rank-deficient sketches are retried with seed + 1, seed + 2, ...
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t used = c.seed + static_cast<std::uint64_t>(attempt);
      Document trial = doc;
      try {
        handler(c, a, used, trial);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficient) throw;
        err << "levsketch: attempt " << attempt + 1 << " with seed " << used << ": " << e.what()
            << '\n';
        if (attempt >= c.retries) {
          err << "levsketch: giving up after " << attempt + 1 << " attempts\n";
          return kExitRetriesExhausted;
        }
        continue;
      }
      trial.params["seed_used"] = used;
      trial.params["attempts"] = attempt + 1;
      trial.timings["load"] = load_ms;
      emit(c, trial, c.seed, out);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "levsketch: error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace levsketch::cli
