#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace linimpute {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;

// Runs one subcommand. args excludes the program name. Diagnostics go to err;
// stdout-style reports go to out.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

}  // namespace linimpute
