#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hestonlab::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericalError = 3 };

/// Runs one CLI invocation. Normal output goes to `out` unless --out names a
/// file; diagnostics and usage go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hestonlab::cli
