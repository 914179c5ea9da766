#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dirac::cli {

enum ExitCode : int { ok = 0, check_failed = 1, usage_error = 2 };

/// Parses argv (argv[0] is the program name), runs one verb, writes the JSON
/// report to --report (or `out`) and a one-line summary to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dirac::cli
