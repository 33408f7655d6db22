#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jargon {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitUnknownWord = 3,
  kExitStaleWorkspace = 4,
};

/// Runs the command line (args[0] is the program name). Results go to
/// `out`, diagnostics to `err`. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version_string() noexcept;

}  // namespace jargon
