#pragma once

// Subcommands of the nonrecip executable.
//
// Exit codes: 0 success, 1 invalid configuration (or comparison mismatch),
// 2 singular solve (or schema error in compare).

#include <ostream>
#include <string>
#include <vector>

namespace nonrecip {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitSingular = 2;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nonrecip
