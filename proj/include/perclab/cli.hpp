#pragma once

#include <string>
#include <vector>

namespace perclab {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitRuntime = 3 };

const std::vector<std::string>& subcommand_names();

// argv[0] is the program name
int cli_dispatch(int argc, const char* const* argv);
// arguments after the program name
int cli_dispatch(const std::vector<std::string>& args);

}  // namespace perclab
