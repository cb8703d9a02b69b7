#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaosbandit::cli {

/// Runs the command line `args` (without the program name). Returns 0 on
/// success, 2 on bad flags, 1 on runtime errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chaosbandit::cli
