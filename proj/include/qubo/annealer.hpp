//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qubo/model.hpp"

namespace qubo {

struct AnnealSchedule {
  double beta_min = 0.1;
  double beta_max = 4.0;
  /// One sweep is n single-bit proposals at a fixed beta.
  std::size_t sweeps = 1000;
};

struct AnnealConfig {
  AnnealSchedule schedule;
  std::size_t reads = 10;
  std::uint64_t seed = 0;
};

/// beta_k = beta_min * (beta_max / beta_min)^(k / (sweeps - 1)); the
/// endpoints are exact. A single sweep runs at beta_min.
std::vector<double> beta_schedule(const AnnealSchedule &schedule);

/// Energy change of flipping bit i given consistent local fields
/// L_i = Q_ii + 2 sum_{j != i} Q_ij x_j:  (1 - 2 x_i) L_i.
double flip_delta(const BinaryVector &x, std::span<const double> fields,
                  std::size_t i);

/// L_i for every i, computed from scratch.
std::vector<double> local_fields(const QuboMatrix &q, const BinaryVector &x);

/// Single-bit Metropolis walker holding a state, its local fields and its
/// running energy. The running energy and fields are incremental; callers
/// needing exact values recompute.
class MetropolisWalker {
public:
  MetropolisWalker(const QuboMatrix &q, BinaryVector x);

  /// Metropolis test for flipping bit i: downhill and flat moves are taken,
  /// uphill ones when `u` < exp(-min(beta * dE, 700)), u in (0, 1].
  /// Returns whether the flip happened.
  bool propose(std::size_t i, double beta, double u);

  /// Flips bit i unconditionally.
  void flip(std::size_t i);

  const BinaryVector &state() const noexcept { return x_; }
  std::span<const double> fields() const noexcept { return fields_; }
  Energy energy() const noexcept { return energy_; }

private:
  const QuboMatrix *q_;
  BinaryVector x_;
  std::vector<double> fields_;
  Energy energy_;
};

struct AnnealResult {
  BinaryVector bits;
  /// energy_binary(q, bits), recomputed after the search.
  Energy energy = 0.0;
  /// reads * sweeps.
  std::size_t sweeps_total = 0;
  double wall_time_s = 0.0;
  std::size_t best_read = 0;
  std::vector<Energy> initial_energies;
};

/// Runs `reads` independent anneals, each from a uniformly random state on
/// its own substream of `seed`, and returns the lowest-energy state visited
/// by any read at any point. Ties between reads go to the lower read index.
AnnealResult anneal(const QuboMatrix &q, const AnnealConfig &config);

} // namespace qubo
