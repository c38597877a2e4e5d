//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <iosfwd>

#include "qubo/model.hpp"

namespace qubo::io {

// QBIN layout: ASCII "QUB1", little-endian u64 n, then n*n IEEE-754
// binary64 values in row-major order, also little-endian.

void write_qbin(std::ostream &out, const QuboMatrix &q);
void write_qbin(const std::filesystem::path &path, const QuboMatrix &q);

/// Throws FormatError on a bad magic, truncated payload or trailing bytes,
/// and ValidationError if the payload is not a valid QuboMatrix.
QuboMatrix read_qbin(std::istream &in);
QuboMatrix read_qbin(const std::filesystem::path &path);

/// Solution document: {"n": int, "bits": [0|1, ...], "energy": float}.
void write_solution(const std::filesystem::path &path, const BinaryVector &x,
                    Energy energy);

/// Parses a solution file. Bits are kept as raw integers so that a corrupt
/// value can be reported as a structure error by verify_solution.
struct RawSolution {
  std::size_t n = 0;
  std::vector<std::int64_t> bits;
  Energy energy = 0.0;
};
RawSolution read_solution(const std::filesystem::path &path);

} // namespace qubo::io
