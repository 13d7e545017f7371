// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace icd::cli {

/// Exit codes: 0 ok, 1 internal error, 2 usage or input error.
enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2 };

/// Runs one command. `args` excludes the program name, e.g.
/// {"decode", "--base", "table:base.json", ...}. Errors are written to
/// `err` as a single JSON object {"error": {"kind", "message"}}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Folds a JSON config file (named by --config) into the argument list:
/// keys become long flags and only fill flags absent from `args`.
std::vector<std::string> merge_config_file(const std::vector<std::string>& args);

} // namespace icd::cli
