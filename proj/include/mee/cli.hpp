#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mee::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;  // domain, infeasible or numerical failure
inline constexpr int kExitInput = 2;   // unreadable files, bad JSON, bad arguments

/// Runs one command line (args excludes the program name). JSON records go
/// to `out`, structured error records to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mee::cli
