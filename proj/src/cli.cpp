//
// SPDX-License-Identifier: Apache-2.0
//

#include "qubo/cli.hpp"

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qubo/bench.hpp"
#include "qubo/error.hpp"
#include "qubo/io.hpp"
#include "qubo/solver.hpp"

namespace qubo::cli {

namespace {

struct GenArgs {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double lo = -5.0;
  double hi = 5.0;
  std::string out;
};

struct SolveArgs {
  std::string matrix;
  std::string backend = "sa";
  double threshold = 1e-4;
  std::uint64_t seed = 0;
  std::string out;
  std::string result;
  double slope = kDefaultSlope;
  std::size_t max_steps = kDefaultMaxSteps;
  std::size_t sweeps = AnnealSchedule{}.sweeps;
  std::size_t reads = AnnealConfig{}.reads;
};

struct BenchArgs {
  std::string config;
  std::string out_dir;
  std::size_t threads = 0;
  bool plots = true;
};

struct VerifyArgs {
  std::string matrix;
  std::string solution;
  double rel_tol = 1e-9;
};

struct PlotArgs {
  std::string records;
  std::string out_dir;
};

int run_gen(const GenArgs &a, std::ostream &out) {
  const auto q = generate_qubo(a.n, a.seed, a.lo, a.hi);
  io::write_qbin(a.out, q);
  out << "wrote " << a.out << " (n = " << q.size() << ")\n";
  return kOk;
}

int run_solve(const SolveArgs &a, std::ostream &out) {
  const auto q = io::read_qbin(a.matrix);
  SolverConfig config = default_config(parse_backend(a.backend));
  config.threshold = a.threshold;
  config.seed = a.seed;
  config.slope = a.slope;
  config.max_steps = a.max_steps;
  config.anneal.schedule.sweeps = a.sweeps;
  config.anneal.reads = a.reads;

  const SolveResult result = solve(q, config);
  io::write_solution(a.out, result.bits, result.energy);
  const std::string json = result_json(result, q.size(), a.threshold);
  if (!a.result.empty()) {
    std::ofstream res(a.result, std::ios::trunc);
    if (!(res << json << '\n'))
      throw IoError("cannot write " + a.result);
  }
  out << json << '\n';
  return kOk;
}

int run_bench(const BenchArgs &a, std::ostream &out) {
  auto spec = bench::load_spec(a.config);
  if (!a.out_dir.empty())
    spec.output_dir = a.out_dir;
  if (a.threads != 0)
    spec.threads = a.threads;
  const auto records = bench::run_experiment(spec);
  out << "records: " << records.size() << '\n';
  if (a.plots) {
    const auto files = bench::emit_plots(records, spec.output_dir);
    out << "plots: " << files.size() << '\n';
  }
  return kOk;
}

int run_verify(const VerifyArgs &a, std::ostream &out, std::ostream &err) {
  const auto q = io::read_qbin(a.matrix);
  const auto sol = io::read_solution(a.solution);
  if (sol.n != q.size()) {
    throw DimensionError("solution has n = " + std::to_string(sol.n) +
                         ", matrix has n = " + std::to_string(q.size()));
  }
  const auto x = BinaryVector::from_values(sol.bits);
  if (!verify_solution(q, x, sol.energy, a.rel_tol)) {
    err << "error: energy-mismatch: claimed " << bench::format_double(sol.energy)
        << ", recomputed " << bench::format_double(energy_binary(q, x))
        << '\n';
    return kEnergyMismatch;
  }
  out << "ok energy=" << bench::format_double(energy_binary(q, x)) << '\n';
  return kOk;
}

int run_plot(const PlotArgs &a, std::ostream &out) {
  const auto records = bench::read_records_csv(a.records);
  const auto files = bench::emit_plots(records, a.out_dir);
  for (const auto &f : files)
    out << f.string() << '\n';
  return kOk;
}

} // namespace

int dispatch(int argc, const char *const *argv, std::ostream &out,
             std::ostream &err) {
  CLI::App app{"QUBO solver suite and benchmark harness", "qubobench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bench::kToolVersion));

  GenArgs gen;
  auto *gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  gen_cmd->add_option("--n", gen.n, "Variable count")->required();
  gen_cmd->add_option("--seed", gen.seed, "Instance seed")->required();
  gen_cmd->add_option("--lo", gen.lo, "Lower entry bound");
  gen_cmd->add_option("--hi", gen.hi, "Upper entry bound");
  gen_cmd->add_option("--out", gen.out, "Output QBIN path")->required();

  SolveArgs solve_args;
  auto *solve_cmd = app.add_subcommand("solve", "Solve one instance");
  solve_cmd->add_option("--matrix", solve_args.matrix, "QBIN input")
      ->required();
  solve_cmd->add_option("--backend", solve_args.backend, "sa|adam|adamw|lbfgs")
      ->required();
  solve_cmd->add_option("--threshold", solve_args.threshold,
                        "Convergence threshold");
  solve_cmd->add_option("--seed", solve_args.seed, "Solver seed");
  solve_cmd->add_option("--out", solve_args.out, "Solution JSON path")
      ->required();
  solve_cmd->add_option("--result", solve_args.result, "Result JSON path");
  solve_cmd->add_option("--slope", solve_args.slope, "Sigmoid slope");
  solve_cmd->add_option("--max-steps", solve_args.max_steps, "Step cap");
  solve_cmd->add_option("--sweeps", solve_args.sweeps, "SA sweeps per read");
  solve_cmd->add_option("--reads", solve_args.reads, "SA reads");

  BenchArgs bench_args;
  auto *bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep");
  bench_cmd->add_option("--config", bench_args.config, "Sweep config file")
      ->required();
  bench_cmd->add_option("--out-dir", bench_args.out_dir, "Output directory");
  bench_cmd->add_option("--threads", bench_args.threads,
                        "Worker count (default QF_THREADS or all cores)");
  bench_cmd->add_flag("!--no-plots", bench_args.plots, "Skip SVG output");

  VerifyArgs verify_args;
  auto *verify_cmd = app.add_subcommand("verify", "Recheck a solution");
  verify_cmd->add_option("--matrix", verify_args.matrix, "QBIN input")
      ->required();
  verify_cmd->add_option("--solution", verify_args.solution, "Solution JSON")
      ->required();
  verify_cmd->add_option("--rel-tol", verify_args.rel_tol,
                         "Relative tolerance");

  PlotArgs plot_args;
  auto *plot_cmd = app.add_subcommand("plot", "Render SVGs from records");
  plot_cmd->add_option("--records", plot_args.records, "records.csv")
      ->required();
  plot_cmd->add_option("--out-dir", plot_args.out_dir, "Output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion &) {
    out << bench::kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError &e) {
    err << "error: usage: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*gen_cmd)
      return run_gen(gen, out);
    if (*solve_cmd)
      return run_solve(solve_args, out);
    if (*bench_cmd)
      return run_bench(bench_args, out);
    if (*verify_cmd)
      return run_verify(verify_args, out, err);
    if (*plot_cmd)
      return run_plot(plot_args, out);
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception &e) {
    err << "error: internal: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

} // namespace qubo::cli
