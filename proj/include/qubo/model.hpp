//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace qubo {

/// QUBO objective value. Lower is better.
using Energy = double;

/// Dense, exactly symmetric, finite n x n matrix stored row-major.
/// Immutable once constructed.
class QuboMatrix {
public:
  /// Takes ownership of `entries` (row-major, n*n values). Throws
  /// ValidationError unless the matrix is square, finite and bitwise
  /// symmetric.
  QuboMatrix(std::size_t n, std::vector<double> entries);

  static QuboMatrix zeros(std::size_t n);
  static QuboMatrix diagonal(std::span<const double> diag);

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * n_ + j];
  }

  std::span<const double> row(std::size_t i) const noexcept {
    return {entries_.data() + i * n_, n_};
  }

  std::span<const double> entries() const noexcept { return entries_; }

  friend bool operator==(const QuboMatrix &, const QuboMatrix &) = default;

private:
  std::size_t n_;
  std::vector<double> entries_;
};

/// Vector over {0,1}. Construction rejects any other value with a
/// StructureError.
class BinaryVector {
public:
  BinaryVector() = default;
  explicit BinaryVector(std::size_t n) : bits_(n, 0) {}
  explicit BinaryVector(std::vector<std::uint8_t> bits);

  /// Validating conversion from arbitrary integers (e.g. parsed JSON).
  static BinaryVector from_values(std::span<const std::int64_t> values);

  /// Bit k of `code` becomes element k.
  static BinaryVector from_code(std::uint64_t code, std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }
  void set(std::size_t i, bool value) noexcept { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) noexcept { bits_[i] ^= 1; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryVector &,
                         const BinaryVector &) = default;

private:
  std::vector<std::uint8_t> bits_;
};

/// R_ij ~ U[lo, hi] i.i.d. from the instance stream of `seed`, then
/// M = (R + R^T) / 2. lo == hi is allowed and yields a constant matrix.
QuboMatrix generate_qubo(std::size_t n, std::uint64_t seed, double lo = -5.0,
                         double hi = 5.0);

/// sum_i Q_ii x_i + sum_{i<j} 2 Q_ij x_i x_j, reading only the upper
/// triangle. Equals x^T Q x at binary points.
Energy energy_binary(const QuboMatrix &q, const BinaryVector &x);

/// Full quadratic form xp^T Q xp for a relaxed vector.
Energy energy_relaxed(const QuboMatrix &q, std::span<const double> xp);

/// Reference x^T Q x with the full double loop. Test oracle only; does not
/// share code with energy_binary.
Energy energy_naive(const QuboMatrix &q, const BinaryVector &x);

inline constexpr std::size_t kBruteForceMaxN = 20;

/// Exhaustive minimum over all 2^n vectors (n <= 20), Gray-code order.
/// Ties resolve to the lowest integer code (bit 0 least significant).
std::pair<BinaryVector, Energy> brute_force_min(const QuboMatrix &q);

/// Recomputes energy_binary and compares against `claimed` with
/// |recomputed - claimed| <= rel_tol * max(1, |recomputed|).
bool verify_solution(const QuboMatrix &q, const BinaryVector &x,
                     Energy claimed, double rel_tol);

/// Same, starting from raw integers. Non-binary values throw
/// StructureError, which is distinct from a `false` energy mismatch.
bool verify_solution(const QuboMatrix &q, std::span<const std::int64_t> x,
                     Energy claimed, double rel_tol);

} // namespace qubo
