#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fatigue::cli {

inline constexpr const char* kToolName = "fatigue";
inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { kSuccess = 0, kDomainError = 1, kUsageError = 2 };

/// Runs one command; `args` excludes the program name. Reports go to `out`,
/// one-line diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fatigue::cli
