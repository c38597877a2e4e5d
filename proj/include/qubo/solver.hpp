//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qubo/annealer.hpp"
#include "qubo/model.hpp"
#include "qubo/optim.hpp"
#include "qubo/relaxation.hpp"

namespace qubo {

enum class Backend { kSa, kAdam, kAdamW, kLbfgs };

inline constexpr std::array<Backend, 4> kAllBackends{
    Backend::kSa, Backend::kAdam, Backend::kAdamW, Backend::kLbfgs};

std::string_view to_string(Backend backend) noexcept;
/// Accepts "sa", "adam", "adamw", "lbfgs"; throws FormatError otherwise.
Backend parse_backend(std::string_view text);

inline constexpr std::array<double, 6> kPaperThresholds{1e-1, 1e-2, 1e-3,
                                                        1e-4, 1e-5, 1e-6};

/// Everything a single solve needs. Fields a backend does not use are
/// ignored by it (SA ignores threshold and max_steps; the gradient backends
/// ignore `anneal`).
struct SolverConfig {
  Backend backend = Backend::kSa;
  double threshold = 1e-4;
  std::size_t max_steps = kDefaultMaxSteps;
  std::uint64_t seed = 0;
  double slope = kDefaultSlope;
  double clamp_lo = kClampLo;
  double clamp_hi = kClampHi;

  /// SA schedule and read count; the seed comes from `seed`.
  AnnealConfig anneal{};

  /// Optimizer settings for the adam/adamw backends.
  AdamConfig adam{};
  bool use_plateau = true;
  PlateauConfig plateau{};
  std::size_t stop_window = 100;
  std::size_t stop_patience = 10;

  std::size_t lbfgs_memory = 10;
};

/// Defaults per backend: lr 0.01 for both Adam variants, decoupled weight
/// decay 1e-5 and no plateau schedule for adamw.
SolverConfig default_config(Backend backend);

/// Throws ValidationError on an unusable configuration.
void validate(const SolverConfig &config);

struct SolveResult {
  BinaryVector bits;
  /// Always energy_binary(q, bits).
  Energy energy = 0.0;
  /// Optimizer steps (adam, adamw), outer iterations (lbfgs) or
  /// reads * sweeps (sa).
  std::size_t steps = 0;
  double wall_time_s = 0.0;
  StopReason stop_reason = StopReason::kConverged;
  Backend backend = Backend::kSa;
  std::uint64_t seed = 0;
};

/// Standard-normal initial logits for the gradient backends, clamped.
std::vector<double> initial_params(std::size_t n, std::uint64_t seed,
                                   double lo = kClampLo, double hi = kClampHi);

SolveResult solve(const QuboMatrix &q, const SolverConfig &config);

struct RepeatedSolve {
  std::vector<SolveResult> runs;
  std::size_t best_index = 0;

  const SolveResult &best() const { return runs.at(best_index); }
};

/// Runs seeds config.seed + k for k < repeats. The best run is the lowest
/// energy, ties to the lowest k.
RepeatedSolve solve_repeated(const QuboMatrix &q, const SolverConfig &config,
                             std::size_t repeats);

/// {"backend","n","threshold","seed","energy","steps","wall_time_s",
///  "stop_reason"} on one line; floats round-trip exactly.
std::string result_json(const SolveResult &result, std::size_t n,
                        double threshold);

} // namespace qubo
