// Command-line front end. `run` parses arguments, dispatches one subcommand
// and writes its result either to stdout or to files in an output directory
// (--out, or the WDRO_OUT_DIR environment variable).
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wdro::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolver = 2;

/// Full argument vector including the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace wdro::cli
