//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qubo/solver.hpp"

namespace qubo::bench {

inline constexpr const char *kToolVersion = QUBOBENCH_VERSION;

inline constexpr const char *kCsvHeader =
    "instance_id,backend,n,threshold,seed,energy,steps,wall_time_s,"
    "stop_reason";

/// One sweep: sizes x instances x backends x thresholds x repeats.
struct ExperimentSpec {
  std::vector<std::size_t> sizes;
  std::vector<double> thresholds{kPaperThresholds.begin(),
                                 kPaperThresholds.end()};
  std::vector<Backend> backends{kAllBackends.begin(), kAllBackends.end()};
  std::size_t repeats = 5;
  std::size_t instances_per_size = 5;
  std::uint64_t seed_base = 0;
  std::filesystem::path output_dir;
  /// 0 picks QF_THREADS, then the hardware concurrency.
  std::size_t threads = 0;

  // Solver knobs shared by every cell.
  double slope = kDefaultSlope;
  std::size_t max_steps = kDefaultMaxSteps;
  std::size_t sweeps = AnnealSchedule{}.sweeps;
  std::size_t reads = AnnealConfig{}.reads;
};

/// Throws ValidationError for empty lists, non-positive values, etc.
void validate(const ExperimentSpec &spec);

/// Flat "key = value" config. Blank lines and lines starting with '#' are
/// skipped; list values are comma separated. Keys: sizes, thresholds,
/// backends, repeats, instances_per_size, seed_base, output_dir, threads,
/// slope, max_steps, sweeps, reads. Unknown keys are a FormatError.
ExperimentSpec parse_spec(std::istream &in);
ExperimentSpec load_spec(const std::filesystem::path &path);
std::string format_spec(const ExperimentSpec &spec);

/// Matrix seed for instance `index` of size n.
std::uint64_t instance_seed(std::uint64_t seed_base, std::size_t n,
                            std::size_t index);

/// The solver configuration used for every run of a sweep cell.
SolverConfig cell_config(const ExperimentSpec &spec, Backend backend,
                         double threshold);

struct BenchRecord {
  std::size_t instance_id = 0;
  Backend backend = Backend::kSa;
  std::size_t n = 0;
  double threshold = 0.0;
  std::uint64_t seed = 0;
  Energy energy = 0.0;
  std::size_t steps = 0;
  double wall_time_s = 0.0;
  StopReason stop_reason = StopReason::kConverged;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

std::filesystem::path matrix_path(const std::filesystem::path &out_dir,
                                  std::size_t n, std::size_t instance_id);
std::filesystem::path solution_path(const std::filesystem::path &out_dir,
                                    const BenchRecord &record);

void write_records_csv(std::ostream &out,
                       const std::vector<BenchRecord> &records);
void write_records_csv(const std::filesystem::path &path,
                       const std::vector<BenchRecord> &records);
std::vector<BenchRecord> read_records_csv(std::istream &in);
std::vector<BenchRecord> read_records_csv(const std::filesystem::path &path);

/// Worker count: `requested` if nonzero, else QF_THREADS if set, else the
/// hardware concurrency (at least 1).
std::size_t resolve_threads(std::size_t requested);

/// Runs the sweep and persists matrices/, solutions/, records.csv and
/// manifest.json under spec.output_dir. Records are ordered by
/// (size, instance, backend, threshold, repeat) whatever the worker count.
std::vector<BenchRecord> run_experiment(const ExperimentSpec &spec);

// ---------------------------------------------------------------- plots

/// (n, instance_id, backend, threshold) -> min energy over repeats.
using EnergyKey = std::tuple<std::size_t, std::size_t, Backend, double>;
/// (n, backend, threshold) -> mean wall time over instances and repeats,
/// summed in record order.
using RuntimeKey = std::tuple<std::size_t, Backend, double>;

std::map<EnergyKey, double>
aggregate_energy(const std::vector<BenchRecord> &records);
std::map<RuntimeKey, double>
aggregate_runtime(const std::vector<BenchRecord> &records);

/// Writes plots/energy_n<N>_i<I>.svg for every (size, instance) and
/// plots/runtime_n<N>.svg for every size. Returns the files written.
std::vector<std::filesystem::path>
emit_plots(const std::vector<BenchRecord> &records,
           const std::filesystem::path &output_dir);

} // namespace qubo::bench
