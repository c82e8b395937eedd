// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anderson {

/// Exit statuses of the anderson-lab command line.
enum ExitStatus : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitViolated = 2,
};

/// Parses `args` (args[0] is the program name), runs the subcommand and
/// reports on `out`; diagnostics and usage text go to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

}  // namespace anderson
