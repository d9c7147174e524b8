#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gcl::cli {

/// Runs one `gcl` command line (arguments after the program name) and returns
/// the process exit status. Failures print a single `error[<kind>]: <reason>`
/// line to `err`: exit status 2 for usage errors, 1 for everything else.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gcl::cli
