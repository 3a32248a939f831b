#pragma once

// Command-line front end.
//
//   collusion <command> [--config PATH] [--out DIR] [--format csv|json] [--seed U64]
//
// Commands: corner thresholds vsafe cutoff simulate tornado iso calibrate.
// Exit codes: 0 success, 1 usage/validation/IO error, 2 solver failure.

#include <ostream>
#include <string>
#include <vector>

namespace collusion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitSolver = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace collusion::cli
