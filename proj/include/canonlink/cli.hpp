#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace canonlink::cli {

enum ExitCode : int { kSuccess = 0, kInputError = 1, kNotConverged = 2 };

// Runs `canonlink <subcommand> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace canonlink::cli
