//
// SPDX-License-Identifier: Apache-2.0
//

#include "qubo/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qubo/error.hpp"
#include "qubo/rng.hpp"

namespace qubo {

namespace {

void check_dims(const QuboMatrix &q, std::size_t len) {
  if (len != q.size()) {
    throw DimensionError("vector length " + std::to_string(len) +
                         " does not match matrix dimension " +
                         std::to_string(q.size()));
  }
}

} // namespace

QuboMatrix::QuboMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ == 0)
    throw ValidationError("matrix dimension must be positive");
  if (entries_.size() != n_ * n_) {
    throw ValidationError("expected " + std::to_string(n_ * n_) +
                          " entries, got " + std::to_string(entries_.size()));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      const double a = entries_[i * n_ + j];
      const double b = entries_[j * n_ + i];
      if (!std::isfinite(a) || !std::isfinite(b)) {
        throw ValidationError("non-finite entry at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
      }
      if (std::bit_cast<std::uint64_t>(a) != std::bit_cast<std::uint64_t>(b)) {
        throw ValidationError("matrix is not symmetric at (" +
                              std::to_string(i) + ", " + std::to_string(j) +
                              ")");
      }
    }
  }
}

QuboMatrix QuboMatrix::zeros(std::size_t n) {
  return QuboMatrix(n, std::vector<double>(n * n, 0.0));
}

QuboMatrix QuboMatrix::diagonal(std::span<const double> diag) {
  const std::size_t n = diag.size();
  std::vector<double> entries(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    entries[i * n + i] = diag[i];
  return QuboMatrix(n, std::move(entries));
}

BinaryVector::BinaryVector(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] > 1) {
      throw StructureError("element " + std::to_string(i) + " is " +
                           std::to_string(bits_[i]) + ", expected 0 or 1");
    }
  }
}

BinaryVector BinaryVector::from_values(std::span<const std::int64_t> values) {
  std::vector<std::uint8_t> bits(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0 && values[i] != 1) {
      throw StructureError("element " + std::to_string(i) + " is " +
                           std::to_string(values[i]) + ", expected 0 or 1");
    }
    bits[i] = static_cast<std::uint8_t>(values[i]);
  }
  return BinaryVector(std::move(bits));
}

BinaryVector BinaryVector::from_code(std::uint64_t code, std::size_t n) {
  BinaryVector x(n);
  for (std::size_t k = 0; k < n && k < 64; ++k)
    x.set(k, ((code >> k) & 1U) != 0);
  return x;
}

QuboMatrix generate_qubo(std::size_t n, std::uint64_t seed, double lo,
                         double hi) {
  if (n == 0)
    throw ValidationError("n must be positive");
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ValidationError("require finite lo <= hi");

  Rng rng(stream_seed(seed, StreamTag::kInstance));
  std::vector<double> raw(n * n);
  for (auto &v : raw)
    v = rng.uniform(lo, hi);

  std::vector<double> sym(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    sym[i * n + i] = raw[i * n + i];
    for (std::size_t j = i + 1; j < n; ++j) {
      // (a + b) / 2 with a, b in [lo, hi] stays in [lo, hi] under IEEE
      // rounding, and the result is written to both halves.
      const double v = (raw[i * n + j] + raw[j * n + i]) / 2.0;
      sym[i * n + j] = v;
      sym[j * n + i] = v;
    }
  }
  return QuboMatrix(n, std::move(sym));
}

Energy energy_binary(const QuboMatrix &q, const BinaryVector &x) {
  check_dims(q, x.size());
  const std::size_t n = q.size();
  const auto bits = x.bits();
  Energy total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bits[i] == 0)
      continue;
    const auto row = q.row(i);
    double off = 0.0;
    for (std::size_t j = i + 1; j < n; ++j)
      off += row[j] * bits[j];
    total += row[i] + 2.0 * off;
  }
  return total;
}

Energy energy_relaxed(const QuboMatrix &q, std::span<const double> xp) {
  check_dims(q, xp.size());
  const std::size_t n = q.size();
  Energy total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = q.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += row[j] * xp[j];
    total += xp[i] * acc;
  }
  return total;
}

Energy energy_naive(const QuboMatrix &q, const BinaryVector &x) {
  check_dims(q, x.size());
  const std::size_t n = q.size();
  Energy total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      total += static_cast<double>(x[i]) * q(i, j) * static_cast<double>(x[j]);
  return total;
}

std::pair<BinaryVector, Energy> brute_force_min(const QuboMatrix &q) {
  const std::size_t n = q.size();
  if (n > kBruteForceMaxN) {
    throw ValidationError("brute force is limited to n <= " +
                          std::to_string(kBruteForceMaxN) + ", got " +
                          std::to_string(n));
  }

  // Incremental walk: fields[i] = Q_ii + 2 sum_{j != i} Q_ij x_j and
  // flipping bit i changes the energy by (1 - 2 x_i) fields[i]. Every code
  // whose running energy lies within `slack` of the running best is kept,
  // then the survivors are recomputed from scratch so rounding drift in the
  // walk cannot decide a tie.
  std::vector<double> fields(n);
  for (std::size_t i = 0; i < n; ++i)
    fields[i] = q(i, i);

  std::uint64_t code = 0;
  double energy = 0.0;
  double best = 0.0;
  std::vector<std::pair<std::uint64_t, double>> candidates{{0, 0.0}};
  const auto slack = [](double e) { return 1e-7 * (1.0 + std::abs(e)); };

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto i = static_cast<std::size_t>(std::countr_zero(k));
    const bool was_set = ((code >> i) & 1U) != 0;
    energy += was_set ? -fields[i] : fields[i];
    code ^= std::uint64_t{1} << i;
    const double sign = was_set ? -2.0 : 2.0;
    const auto row = q.row(i);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i)
        fields[j] += sign * row[j];

    if (energy > best + slack(best))
      continue;
    if (energy < best) {
      best = energy;
      const double cutoff = best + slack(best);
      std::erase_if(candidates,
                    [cutoff](const auto &c) { return c.second > cutoff; });
    }
    candidates.emplace_back(code, energy);
  }

  BinaryVector best_x;
  Energy best_e = 0.0;
  std::uint64_t best_code = 0;
  bool have = false;
  for (const auto &candidate : candidates) {
    const std::uint64_t c = candidate.first;
    BinaryVector x = BinaryVector::from_code(c, n);
    const Energy e = energy_binary(q, x);
    if (!have || e < best_e || (e == best_e && c < best_code)) {
      best_x = std::move(x);
      best_e = e;
      best_code = c;
      have = true;
    }
  }
  return {std::move(best_x), best_e};
}

bool verify_solution(const QuboMatrix &q, const BinaryVector &x,
                     Energy claimed, double rel_tol) {
  if (!(rel_tol > 0.0))
    throw ValidationError("rel_tol must be positive");
  const Energy recomputed = energy_binary(q, x);
  if (!std::isfinite(claimed))
    return false;
  return std::abs(recomputed - claimed) <=
         rel_tol * std::max(1.0, std::abs(recomputed));
}

bool verify_solution(const QuboMatrix &q, std::span<const std::int64_t> x,
                     Energy claimed, double rel_tol) {
  check_dims(q, x.size());
  return verify_solution(q, BinaryVector::from_values(x), claimed, rel_tol);
}

} // namespace qubo
