//
// SPDX-License-Identifier: Apache-2.0
//

#include "qubo/annealer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "qubo/error.hpp"
#include "qubo/rng.hpp"

namespace qubo {

std::vector<double> beta_schedule(const AnnealSchedule &schedule) {
  if (!(schedule.beta_min > 0.0) || !(schedule.beta_max > 0.0))
    throw ValidationError("betas must be positive");
  if (schedule.beta_min > schedule.beta_max)
    throw ValidationError("beta_min must not exceed beta_max");
  if (schedule.sweeps == 0)
    throw ValidationError("sweeps must be positive");

  const std::size_t count = schedule.sweeps;
  std::vector<double> betas(count, schedule.beta_min);
  if (count == 1)
    return betas;
  const double ratio = schedule.beta_max / schedule.beta_min;
  const double last = static_cast<double>(count - 1);
  for (std::size_t k = 1; k + 1 < count; ++k)
    betas[k] = schedule.beta_min * std::pow(ratio, static_cast<double>(k) / last);
  betas.back() = schedule.beta_max;
  return betas;
}

double flip_delta(const BinaryVector &x, std::span<const double> fields,
                  std::size_t i) {
  if (i >= x.size() || i >= fields.size())
    throw ValidationError("bit index " + std::to_string(i) + " out of range");
  return x[i] != 0 ? -fields[i] : fields[i];
}

std::vector<double> local_fields(const QuboMatrix &q, const BinaryVector &x) {
  if (x.size() != q.size())
    throw DimensionError("state length does not match matrix dimension");
  const std::size_t n = q.size();
  std::vector<double> fields(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = q.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && x[j] != 0)
        acc += row[j];
    fields[i] = row[i] + 2.0 * acc;
  }
  return fields;
}

MetropolisWalker::MetropolisWalker(const QuboMatrix &q, BinaryVector x)
    : q_(&q), x_(std::move(x)), fields_(local_fields(q, x_)),
      energy_(energy_binary(q, x_)) {}

void MetropolisWalker::flip(std::size_t i) {
  const double delta = x_[i] != 0 ? -fields_[i] : fields_[i];
  const double coef = x_[i] != 0 ? -2.0 : 2.0;
  x_.flip(i);
  energy_ += delta;
  const auto row = q_->row(i);
  const double keep = fields_[i];
  double *fields = fields_.data();
  const std::size_t n = fields_.size();
  for (std::size_t j = 0; j < n; ++j)
    fields[j] += coef * row[j];
  fields_[i] = keep;
}

bool MetropolisWalker::propose(std::size_t i, double beta, double u) {
  const double delta = x_[i] != 0 ? -fields_[i] : fields_[i];
  if (delta > 0.0 && !(u < std::exp(-std::min(beta * delta, 700.0))))
    return false;
  flip(i);
  return true;
}

namespace {

struct ReadOutcome {
  BinaryVector best;
  Energy best_energy = 0.0;
  Energy initial_energy = 0.0;
};

ReadOutcome run_read(const QuboMatrix &q, std::span<const double> betas,
                     std::uint64_t seed) {
  const std::size_t n = q.size();
  Rng rng(seed);
  BinaryVector start(n);
  for (std::size_t i = 0; i < n; ++i)
    start.set(i, rng.coin());

  MetropolisWalker walker(q, start);
  ReadOutcome out;
  out.initial_energy = walker.energy();
  out.best = walker.state();
  double best_running = walker.energy();

  for (const double beta : betas) {
    for (std::size_t p = 0; p < n; ++p) {
      const auto i = static_cast<std::size_t>(rng.below(n));
      const double delta = flip_delta(walker.state(), walker.fields(), i);
      // Draw the acceptance variate only for uphill moves.
      const double u = delta > 0.0 ? rng.uniform_pos() : 1.0;
      if (walker.propose(i, beta, u) && walker.energy() < best_running) {
        best_running = walker.energy();
        out.best = walker.state();
      }
    }
  }

  out.best_energy = energy_binary(q, out.best);
  if (out.initial_energy < out.best_energy) {
    out.best = std::move(start);
    out.best_energy = out.initial_energy;
  }
  return out;
}

} // namespace

AnnealResult anneal(const QuboMatrix &q, const AnnealConfig &config) {
  if (config.reads == 0)
    throw ValidationError("reads must be positive");
  const auto betas = beta_schedule(config.schedule);
  const auto started = std::chrono::steady_clock::now();

  AnnealResult result;
  result.initial_energies.reserve(config.reads);
  for (std::size_t r = 0; r < config.reads; ++r) {
    auto outcome =
        run_read(q, betas, stream_seed(config.seed, StreamTag::kAnnealRead, r));
    result.initial_energies.push_back(outcome.initial_energy);
    if (r == 0 || outcome.best_energy < result.energy) {
      result.bits = std::move(outcome.best);
      result.energy = outcome.best_energy;
      result.best_read = r;
    }
  }
  result.energy = energy_binary(q, result.bits);
  result.sweeps_total = config.reads * config.schedule.sweeps;
  result.wall_time_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  return result;
}

} // namespace qubo
