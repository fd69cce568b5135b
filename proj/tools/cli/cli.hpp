// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qflow::cli {

/// Exit codes shared by every subcommand.
enum Exit : int {
    kOk = 0,
    kInputError = 1,
    kDeviceError = 2,
    kTranspileError = 3,
    kBackendError = 4,
};

/// Runs one command line (without the program name). Data goes to `out`,
/// diagnostics to `err` as a single `error: ...` line; `in` backs the `-`
/// input path.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace qflow::cli
