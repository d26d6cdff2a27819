// Command-line entry point: solve / gamma / residual / material-table /
// export subcommands over a problem configuration file.
#pragma once

#include <string>
#include <vector>

namespace fvk {

int run_cli(int argc, char** argv);

// Same interface for in-process use; args exclude the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace fvk
