//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>

namespace qubo::cli {

/// Exit codes. Errors are reported as one line "error: <kind>: <message>"
/// on the error stream, where kind is usage, validation, dimension,
/// structure, format, io or energy-mismatch.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kEnergyMismatch = 3,
};

/// Subcommands: gen, solve, bench, verify, plot. See `--help`.
int dispatch(int argc, const char *const *argv, std::ostream &out,
             std::ostream &err);

} // namespace qubo::cli
