#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stickylab {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumerical = 2,
  kExitCheckFailed = 3,
};

/// Name of the environment variable that sets the base output directory
/// when --out is not given.
inline constexpr const char* kOutputDirEnv = "STICKYLAB_OUTPUT_DIR";

/// Command-line entry point. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace stickylab
