//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <span>
#include <vector>

#include "qubo/model.hpp"

namespace qubo {

inline constexpr double kDefaultSlope = 1.0;

/// Unconstrained logits plus the sharpness of their sigmoid projection.
struct ContinuousVector {
  std::vector<double> params;
  double slope = kDefaultSlope;

  std::size_t size() const noexcept { return params.size(); }
};

/// 1 / (1 + exp(-z)) without overflow for any finite z.
double stable_sigmoid(double z) noexcept;

/// x'_i = sigmoid(slope * (x_i - 0.5)).
std::vector<double> sigmoid_project(const ContinuousVector &x);
void sigmoid_project(std::span<const double> params, double slope,
                     std::span<double> out);

/// Hard threshold at 0.5; exactly 0.5 maps to 1.
BinaryVector binarize(std::span<const double> xp);

struct LossAndGrad {
  Energy loss = 0.0;
  std::vector<double> grad;
};

/// L = x'^T Q x' and dL/dx_i = 2 (Q x')_i x'_i (1 - x'_i) slope.
LossAndGrad relaxed_loss_and_grad(const QuboMatrix &q,
                                  const ContinuousVector &x);

/// Allocation-free variant for optimizer inner loops. `projected` and
/// `qx` are scratch of length n; returns the loss and fills `grad`.
Energy relaxed_loss_and_grad(const QuboMatrix &q,
                             std::span<const double> params, double slope,
                             std::span<double> projected, std::span<double> qx,
                             std::span<double> grad);

} // namespace qubo
