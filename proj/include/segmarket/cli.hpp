#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace segmarket::cli {

/// Runs the command line tool on `args` (excluding the program name) and
/// returns the process exit code:
///   0 success, 2 validation error, 3 solver error, 4 assumption error.
/// Results go to `out` only when --out is "-"; diagnostics go to `err` as a
/// one-line JSON object {code, message, context}.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace segmarket::cli
