#pragma once

#include <ostream>
#include <span>
#include <string>

namespace cusp::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 1,
    kThreshold = 2,
    kNumerical = 3,
};

/// Runs one subcommand. args[0] is the program name.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace cusp::cli
