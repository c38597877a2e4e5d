//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qubo/relaxation.hpp"

namespace qubo {

inline constexpr double kClampLo = -5.0;
inline constexpr double kClampHi = 5.0;
inline constexpr std::size_t kDefaultMaxSteps = 1'000'000;

enum class StopReason { kConverged, kMaxSteps, kNumericFailure };

std::string_view to_string(StopReason reason) noexcept;
/// Inverse of to_string; throws FormatError on unknown text.
StopReason parse_stop_reason(std::string_view text);

/// Elementwise projection onto [lo, hi].
void clamp_box(std::span<double> params, double lo = kClampLo,
               double hi = kClampHi);

// ---------------------------------------------------------------- Adam(W)

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// 0 is plain Adam; > 0 adds decoupled decay (AdamW).
  double weight_decay = 0.0;
};

/// Bias-corrected Adam with optional decoupled weight decay. The update
/// reads the pre-step parameters for both terms:
///   p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * p)
/// and the result is clamped to the box.
class Adam {
public:
  Adam(std::size_t n, AdamConfig config);

  /// Returns false, leaving everything untouched, if `grad` has a
  /// non-finite entry.
  [[nodiscard]] bool step(std::span<double> params,
                          std::span<const double> grad, double lo = kClampLo,
                          double hi = kClampHi);

  double lr() const noexcept { return config_.lr; }
  void set_lr(double lr) noexcept { config_.lr = lr; }
  const AdamConfig &config() const noexcept { return config_; }
  std::size_t steps() const noexcept { return t_; }
  std::span<const double> first_moment() const noexcept { return m_; }
  std::span<const double> second_moment() const noexcept { return v_; }

private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
  double beta1_pow_ = 1.0;
  double beta2_pow_ = 1.0;
};

// ------------------------------------------------------ plateau schedule

struct PlateauConfig {
  double factor = 0.5;
  std::size_t patience = 1000;
  double min_lr = 1e-5;
  double improvement_eps = 1e-8;
};

/// Multiplies the learning rate by `factor` after `patience` observations
/// without an improvement larger than `improvement_eps`.
class PlateauScheduler {
public:
  explicit PlateauScheduler(PlateauConfig config = {});

  /// Returns the learning rate to use from now on.
  double observe(double loss, double lr);

  double best_loss() const noexcept { return best_; }
  std::size_t steps_since_improve() const noexcept { return since_; }

private:
  PlateauConfig config_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t since_ = 0;
};

// ------------------------------------------------------- early stopping

struct StopConfig {
  std::size_t window = 100;
  std::size_t patience = 10;
  double threshold = 1e-4;
  std::size_t max_steps = kDefaultMaxSteps;
};

/// Moving-average early stopping. The latest `window` losses are compared
/// with the `window` losses before them:
///   r = |mean_now - mean_prev| / max(|mean_prev|, 1e-12).
/// Checks start once more than 2 * window losses have been seen; each check
/// with r < threshold extends a streak, any other check resets it, and a
/// streak of `patience` stops the run.
class StopController {
public:
  explicit StopController(StopConfig config);

  /// `step` is the 0-based index of this observation. Returns nullopt to
  /// continue. A run stops with kMaxSteps once `max_steps` losses have been
  /// observed.
  std::optional<StopReason> observe(double loss, std::size_t step);

  std::size_t consecutive_hits() const noexcept { return hits_; }
  std::size_t history_size() const noexcept { return history_.size(); }
  const StopConfig &config() const noexcept { return config_; }

private:
  StopConfig config_;
  std::deque<double> history_;
  std::size_t seen_ = 0;
  std::size_t hits_ = 0;
};

// ------------------------------------------------------- bounded L-BFGS

struct LbfgsConfig {
  std::size_t memory = 10;
  double lo = kClampLo;
  double hi = kClampHi;
  /// Relative-decrease tolerance (f_k - f_k+1) / max(|f_k|, |f_k+1|, 1).
  double ftol = 1e-4;
  double pgtol = 1e-12;
  std::size_t max_iter = kDefaultMaxSteps;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 60;
  bool record_trace = false;
};

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t iterations = 0;
  StopReason reason = StopReason::kConverged;
  /// Accepted objective values, starting with f(x0). Filled only when
  /// LbfgsConfig::record_trace is set.
  std::vector<double> trace;
};

/// Writes the gradient at `x` into `grad` and returns the objective.
using Objective =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Projected limited-memory BFGS: two-loop recursion direction, coordinates
/// pinned at a bound with an outward gradient are frozen, and trial points
/// are projected onto the box inside an Armijo backtracking search.
/// Curvature pairs with s^T y <= 1e-12 are dropped.
LbfgsResult lbfgs_minimize(const Objective &objective,
                           std::span<const double> x0,
                           const LbfgsConfig &config);

/// Minimizes the sigmoid-relaxed QUBO loss from `x0` (slope taken from x0).
/// The returned `f` is the relaxed loss at the final iterate.
LbfgsResult lbfgs_minimize(const QuboMatrix &q, const ContinuousVector &x0,
                           const LbfgsConfig &config);

/// Max-norm of P(x - g) - x over the box.
double projected_gradient_norm(std::span<const double> x,
                               std::span<const double> grad, double lo,
                               double hi);

} // namespace qubo
