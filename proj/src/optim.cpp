//
// SPDX-License-Identifier: Apache-2.0
//

#include "qubo/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qubo/error.hpp"

namespace qubo {

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
  case StopReason::kConverged:
    return "converged";
  case StopReason::kMaxSteps:
    return "max_steps";
  case StopReason::kNumericFailure:
    return "numeric_failure";
  }
  return "unknown";
}

StopReason parse_stop_reason(std::string_view text) {
  if (text == "converged")
    return StopReason::kConverged;
  if (text == "max_steps")
    return StopReason::kMaxSteps;
  if (text == "numeric_failure")
    return StopReason::kNumericFailure;
  throw FormatError("unknown stop reason '" + std::string(text) + "'");
}

void clamp_box(std::span<double> params, double lo, double hi) {
  for (auto &p : params)
    p = std::clamp(p, lo, hi);
}

Adam::Adam(std::size_t n, AdamConfig config)
    : config_(config), m_(n, 0.0), v_(n, 0.0) {}

bool Adam::step(std::span<double> params, std::span<const double> grad,
                double lo, double hi) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw DimensionError("Adam state has length " + std::to_string(m_.size()));
  for (const double g : grad)
    if (!std::isfinite(g))
      return false;

  ++t_;
  beta1_pow_ *= config_.beta1;
  beta2_pow_ *= config_.beta2;
  const double c1 = 1.0 - beta1_pow_;
  const double c2 = 1.0 - beta2_pow_;
  const double lr = config_.lr;
  const double wd = config_.weight_decay;

  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    double update = m_hat / (std::sqrt(v_hat) + config_.eps);
    if (wd > 0.0)
      update += wd * params[i];
    params[i] = std::clamp(params[i] - lr * update, lo, hi);
  }
  return true;
}

PlateauScheduler::PlateauScheduler(PlateauConfig config) : config_(config) {}

double PlateauScheduler::observe(double loss, double lr) {
  if (loss < best_ - config_.improvement_eps) {
    best_ = loss;
    since_ = 0;
    return lr;
  }
  ++since_;
  if (since_ >= config_.patience) {
    since_ = 0;
    if (lr > config_.min_lr)
      lr = std::max(config_.min_lr, lr * config_.factor);
  }
  return lr;
}

StopController::StopController(StopConfig config) : config_(config) {
  if (config_.window == 0 || config_.patience == 0 || config_.max_steps == 0)
    throw ValidationError("window, patience and max_steps must be positive");
  if (!(config_.threshold > 0.0))
    throw ValidationError("threshold must be positive");
}

std::optional<StopReason> StopController::observe(double loss,
                                                  std::size_t step) {
  if (!std::isfinite(loss))
    return StopReason::kNumericFailure;

  const std::size_t w = config_.window;
  history_.push_back(loss);
  if (history_.size() > 2 * w)
    history_.pop_front();
  ++seen_;

  if (seen_ > 2 * w) {
    const auto mid = history_.begin() + static_cast<std::ptrdiff_t>(w);
    const double prev =
        std::accumulate(history_.begin(), mid, 0.0) / static_cast<double>(w);
    const double now =
        std::accumulate(mid, history_.end(), 0.0) / static_cast<double>(w);
    const double r = std::abs(now - prev) / std::max(std::abs(prev), 1e-12);
    hits_ = r < config_.threshold ? hits_ + 1 : 0;
    if (hits_ >= config_.patience)
      return StopReason::kConverged;
  }
  if (step + 1 >= config_.max_steps)
    return StopReason::kMaxSteps;
  return std::nullopt;
}

double projected_gradient_norm(std::span<const double> x,
                               std::span<const double> grad, double lo,
                               double hi) {
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pg = std::clamp(x[i] - grad[i], lo, hi) - x[i];
    norm = std::max(norm, std::abs(pg));
  }
  return norm;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a[i] * b[i];
  return acc;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double e) { return std::isfinite(e); });
}

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho = 0.0;
};

// d = -H g by the two-loop recursion, H0 = gamma I with
// gamma = s^T y / y^T y from the newest pair.
void two_loop(const std::deque<CurvaturePair> &pairs,
              std::span<const double> grad, std::span<double> d,
              std::vector<double> &alpha) {
  std::copy(grad.begin(), grad.end(), d.begin());
  alpha.assign(pairs.size(), 0.0);
  for (std::size_t k = pairs.size(); k-- > 0;) {
    const auto &p = pairs[k];
    alpha[k] = p.rho * dot(p.s, d);
    for (std::size_t i = 0; i < d.size(); ++i)
      d[i] -= alpha[k] * p.y[i];
  }
  if (!pairs.empty()) {
    const auto &last = pairs.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (auto &e : d)
      e *= gamma;
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto &p = pairs[k];
    const double beta = p.rho * dot(p.y, d);
    for (std::size_t i = 0; i < d.size(); ++i)
      d[i] += (alpha[k] - beta) * p.s[i];
  }
  for (auto &e : d)
    e = -e;
}

} // namespace

LbfgsResult lbfgs_minimize(const Objective &objective,
                           std::span<const double> x0,
                           const LbfgsConfig &config) {
  if (!(config.lo <= config.hi))
    throw ValidationError("L-BFGS bounds require lo <= hi");
  if (config.memory == 0)
    throw ValidationError("L-BFGS memory must be positive");

  const std::size_t n = x0.size();
  const double lo = config.lo;
  const double hi = config.hi;

  LbfgsResult result;
  std::vector<double> x(x0.begin(), x0.end());
  clamp_box(x, lo, hi);
  std::vector<double> g(n);
  double f = objective(x, g);

  const auto finish = [&](StopReason reason) {
    result.x = x;
    result.f = f;
    result.reason = reason;
    return result;
  };
  if (!std::isfinite(f) || !all_finite(g))
    return finish(StopReason::kNumericFailure);
  if (config.record_trace)
    result.trace.push_back(f);

  std::deque<CurvaturePair> pairs;
  std::vector<double> d(n);
  std::vector<double> xt(n);
  std::vector<double> gt(n);
  std::vector<double> alpha;

  const auto is_pinned = [&](std::size_t i) {
    return (x[i] <= lo && g[i] > 0.0) || (x[i] >= hi && g[i] < 0.0);
  };
  const auto steepest = [&] {
    for (std::size_t i = 0; i < n; ++i)
      d[i] = is_pinned(i) ? 0.0 : -g[i];
  };

  while (true) {
    if (projected_gradient_norm(x, g, lo, hi) <= config.pgtol)
      return finish(StopReason::kConverged);
    if (result.iterations >= config.max_iter)
      return finish(StopReason::kMaxSteps);

    two_loop(pairs, g, d, alpha);
    for (std::size_t i = 0; i < n; ++i)
      if (is_pinned(i))
        d[i] = 0.0;
    if (pairs.empty() || !(dot(g, d) < 0.0)) {
      pairs.clear();
      steepest();
    }

    bool accepted = false;
    double ft = f;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) {
        // The quasi-Newton direction failed; retry once along the
        // projected steepest descent with fresh memory.
        if (pairs.empty())
          break;
        pairs.clear();
        steepest();
      }
      double step = 1.0;
      if (pairs.empty()) {
        double dmax = 0.0;
        for (const double e : d)
          dmax = std::max(dmax, std::abs(e));
        if (dmax > 1.0)
          step = 1.0 / dmax;
      }
      for (std::size_t bt = 0; bt <= config.max_backtracks; ++bt) {
        for (std::size_t i = 0; i < n; ++i)
          xt[i] = std::clamp(x[i] + step * d[i], lo, hi);
        double decrease = 0.0;
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
          const double delta = xt[i] - x[i];
          decrease += g[i] * delta;
          moved = moved || delta != 0.0;
        }
        if (!moved)
          break;
        ft = objective(xt, gt);
        if (!std::isfinite(ft) || !all_finite(gt))
          return finish(StopReason::kNumericFailure);
        if (ft <= f + config.armijo_c1 * decrease) {
          accepted = true;
          break;
        }
        step *= config.backtrack;
      }
    }
    if (!accepted)
      return finish(StopReason::kConverged);

    CurvaturePair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = xt[i] - x[i];
      pair.y[i] = gt[i] - g[i];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-12) {
      pair.rho = 1.0 / sy;
      pairs.push_back(std::move(pair));
      if (pairs.size() > config.memory)
        pairs.pop_front();
    }

    ++result.iterations;
    const double rel =
        (f - ft) / std::max({std::abs(f), std::abs(ft), 1.0});
    x.swap(xt);
    g.swap(gt);
    f = ft;
    if (config.record_trace)
      result.trace.push_back(f);
    if (rel <= config.ftol)
      return finish(StopReason::kConverged);
  }
}

LbfgsResult lbfgs_minimize(const QuboMatrix &q, const ContinuousVector &x0,
                           const LbfgsConfig &config) {
  if (x0.size() != q.size())
    throw DimensionError("initial point length " + std::to_string(x0.size()) +
                         " does not match matrix dimension " +
                         std::to_string(q.size()));
  const double slope = x0.slope;
  std::vector<double> projected(q.size());
  std::vector<double> qx(q.size());
  const Objective objective = [&](std::span<const double> x,
                                  std::span<double> grad) {
    return relaxed_loss_and_grad(q, x, slope, projected, qx, grad);
  };
  return lbfgs_minimize(objective, x0.params, config);
}

} // namespace qubo
