#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ushape {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_parse = 2,
  exit_verification = 3,
  exit_io = 4,
};

/// Runs the `ushape` command line (arguments without the program name).
/// Results go to `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ushape
