//
// SPDX-License-Identifier: Apache-2.0
//

#include "qubo/solver.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

#include "qubo/error.hpp"
#include "qubo/rng.hpp"

namespace qubo {

std::string_view to_string(Backend backend) noexcept {
  switch (backend) {
  case Backend::kSa:
    return "sa";
  case Backend::kAdam:
    return "adam";
  case Backend::kAdamW:
    return "adamw";
  case Backend::kLbfgs:
    return "lbfgs";
  }
  return "unknown";
}

Backend parse_backend(std::string_view text) {
  for (const Backend b : kAllBackends)
    if (text == to_string(b))
      return b;
  throw FormatError("unknown backend '" + std::string(text) + "'");
}

SolverConfig default_config(Backend backend) {
  SolverConfig config;
  config.backend = backend;
  if (backend == Backend::kAdamW) {
    config.adam.weight_decay = 1e-5;
    config.use_plateau = false;
  }
  return config;
}

void validate(const SolverConfig &config) {
  if (!(config.threshold > 0.0))
    throw ValidationError("threshold must be positive");
  if (config.max_steps == 0)
    throw ValidationError("max_steps must be positive");
  if (!(config.slope > 0.0) || !std::isfinite(config.slope))
    throw ValidationError("slope must be positive and finite");
  if (!(config.clamp_lo <= config.clamp_hi))
    throw ValidationError("clamp bounds require lo <= hi");
  if (!(config.adam.lr > 0.0))
    throw ValidationError("learning rate must be positive");
  if (config.adam.weight_decay < 0.0)
    throw ValidationError("weight decay must be nonnegative");
  if (config.anneal.reads == 0)
    throw ValidationError("reads must be positive");
  if (config.stop_window == 0 || config.stop_patience == 0)
    throw ValidationError("stop window and patience must be positive");
  if (config.lbfgs_memory == 0)
    throw ValidationError("L-BFGS memory must be positive");
}

std::vector<double> initial_params(std::size_t n, std::uint64_t seed,
                                   double lo, double hi) {
  Rng rng(stream_seed(seed, StreamTag::kGradInit));
  std::vector<double> params(n);
  for (auto &p : params)
    p = rng.normal();
  clamp_box(params, lo, hi);
  return params;
}

namespace {

struct GradientOutcome {
  std::vector<double> params;
  std::size_t steps = 0;
  StopReason reason = StopReason::kConverged;
};

GradientOutcome run_adam(const QuboMatrix &q, const SolverConfig &config) {
  const std::size_t n = q.size();
  GradientOutcome out;
  out.params =
      initial_params(n, config.seed, config.clamp_lo, config.clamp_hi);

  Adam optimizer(n, config.adam);
  PlateauScheduler scheduler(config.plateau);
  StopController stopper({config.stop_window, config.stop_patience,
                          config.threshold, config.max_steps});
  std::vector<double> projected(n);
  std::vector<double> qx(n);
  std::vector<double> grad(n);

  for (std::size_t step = 0;; ++step) {
    const double loss = relaxed_loss_and_grad(q, out.params, config.slope,
                                              projected, qx, grad);
    if (!std::isfinite(loss) ||
        !optimizer.step(out.params, grad, config.clamp_lo, config.clamp_hi)) {
      out.steps = step;
      out.reason = StopReason::kNumericFailure;
      return out;
    }
    if (config.use_plateau)
      optimizer.set_lr(scheduler.observe(loss, optimizer.lr()));
    if (const auto stop = stopper.observe(loss, step)) {
      out.steps = step + 1;
      out.reason = *stop;
      return out;
    }
  }
}

GradientOutcome run_lbfgs(const QuboMatrix &q, const SolverConfig &config) {
  LbfgsConfig lbfgs;
  lbfgs.memory = config.lbfgs_memory;
  lbfgs.lo = config.clamp_lo;
  lbfgs.hi = config.clamp_hi;
  lbfgs.ftol = config.threshold;
  lbfgs.max_iter = config.max_steps;

  ContinuousVector x0{
      initial_params(q.size(), config.seed, config.clamp_lo, config.clamp_hi),
      config.slope};
  auto res = lbfgs_minimize(q, x0, lbfgs);
  return {std::move(res.x), res.iterations, res.reason};
}

} // namespace

SolveResult solve(const QuboMatrix &q, const SolverConfig &config) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();

  SolveResult result;
  result.backend = config.backend;
  result.seed = config.seed;

  if (config.backend == Backend::kSa) {
    AnnealConfig anneal = config.anneal;
    anneal.seed = config.seed;
    auto res = qubo::anneal(q, anneal);
    result.bits = std::move(res.bits);
    result.steps = res.sweeps_total;
    result.stop_reason = StopReason::kConverged;
  } else {
    auto outcome = config.backend == Backend::kLbfgs ? run_lbfgs(q, config)
                                                     : run_adam(q, config);
    ContinuousVector x{std::move(outcome.params), config.slope};
    result.bits = binarize(sigmoid_project(x));
    result.steps = outcome.steps;
    result.stop_reason = outcome.reason;
  }
  result.energy = energy_binary(q, result.bits);
  result.wall_time_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  return result;
}

RepeatedSolve solve_repeated(const QuboMatrix &q, const SolverConfig &config,
                             std::size_t repeats) {
  if (repeats == 0)
    throw ValidationError("repeats must be positive");
  RepeatedSolve out;
  out.runs.reserve(repeats);
  for (std::size_t k = 0; k < repeats; ++k) {
    SolverConfig run = config;
    run.seed = config.seed + k;
    out.runs.push_back(solve(q, run));
    if (out.runs.back().energy < out.runs[out.best_index].energy)
      out.best_index = k;
  }
  return out;
}

std::string result_json(const SolveResult &result, std::size_t n,
                        double threshold) {
  nlohmann::ordered_json doc;
  doc["backend"] = to_string(result.backend);
  doc["n"] = n;
  doc["threshold"] = threshold;
  doc["seed"] = result.seed;
  doc["energy"] = result.energy;
  doc["steps"] = result.steps;
  doc["wall_time_s"] = result.wall_time_s;
  doc["stop_reason"] = to_string(result.stop_reason);
  return doc.dump();
}

} // namespace qubo
