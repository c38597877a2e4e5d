//
// SPDX-License-Identifier: Apache-2.0
//

#include "qubo/relaxation.hpp"

#include <cmath>

#include "qubo/error.hpp"

namespace qubo {

namespace {

// Four independent partial sums; the fixed association keeps results
// reproducible while letting the loop pipeline.
double row_dot(std::span<const double> row, std::span<const double> v) {
  const std::size_t n = row.size();
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    a0 += row[j] * v[j];
    a1 += row[j + 1] * v[j + 1];
    a2 += row[j + 2] * v[j + 2];
    a3 += row[j + 3] * v[j + 3];
  }
  for (; j < n; ++j)
    a0 += row[j] * v[j];
  return (a0 + a1) + (a2 + a3);
}

} // namespace

double stable_sigmoid(double z) noexcept {
  if (z >= 0.0)
    return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void sigmoid_project(std::span<const double> params, double slope,
                     std::span<double> out) {
  for (std::size_t i = 0; i < params.size(); ++i)
    out[i] = stable_sigmoid(slope * (params[i] - 0.5));
}

std::vector<double> sigmoid_project(const ContinuousVector &x) {
  std::vector<double> out(x.size());
  sigmoid_project(x.params, x.slope, out);
  return out;
}

BinaryVector binarize(std::span<const double> xp) {
  BinaryVector bits(xp.size());
  for (std::size_t i = 0; i < xp.size(); ++i)
    bits.set(i, xp[i] >= 0.5);
  return bits;
}

Energy relaxed_loss_and_grad(const QuboMatrix &q,
                             std::span<const double> params, double slope,
                             std::span<double> projected, std::span<double> qx,
                             std::span<double> grad) {
  const std::size_t n = q.size();
  if (params.size() != n) {
    throw DimensionError("parameter length " + std::to_string(params.size()) +
                         " does not match matrix dimension " +
                         std::to_string(n));
  }
  sigmoid_project(params, slope, projected);

  Energy loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double acc = row_dot(q.row(i), projected);
    qx[i] = acc;
    loss += projected[i] * acc;
  }
  // Symmetric Q: d(x'^T Q x')/dx' = 2 Q x', chained through the sigmoid.
  // x'(1 - x') is formed as sigmoid(z) * sigmoid(-z) so that it keeps its
  // relative precision when x' is within rounding of 1.
  for (std::size_t i = 0; i < n; ++i) {
    const double z = slope * (params[i] - 0.5);
    grad[i] = 2.0 * qx[i] * projected[i] * stable_sigmoid(-z) * slope;
  }
  return loss;
}

LossAndGrad relaxed_loss_and_grad(const QuboMatrix &q,
                                  const ContinuousVector &x) {
  const std::size_t n = x.size();
  std::vector<double> projected(n);
  std::vector<double> qx(n);
  LossAndGrad out;
  out.grad.resize(n);
  out.loss =
      relaxed_loss_and_grad(q, x.params, x.slope, projected, qx, out.grad);
  return out;
}

} // namespace qubo
