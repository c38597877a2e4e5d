//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace qubo {

/// Base of every error raised by the library. `kind()` is a stable,
/// machine-readable tag used as the prefix of CLI error lines.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string &what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string &kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

/// Precondition violated by a caller-supplied value (n = 0, lo >= hi, ...).
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string &what)
      : Error("validation", what) {}
};

class DimensionError : public Error {
public:
  explicit DimensionError(const std::string &what)
      : Error("dimension", what) {}
};

/// A binary vector holds something other than 0/1.
class StructureError : public Error {
public:
  explicit StructureError(const std::string &what)
      : Error("structure", what) {}
};

/// Malformed QBIN, JSON, CSV or config input.
class FormatError : public Error {
public:
  explicit FormatError(const std::string &what) : Error("format", what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string &what) : Error("io", what) {}
};

} // namespace qubo
