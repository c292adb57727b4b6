#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssp::cli {

// Parses and executes one command line (without the program name).
// Returns the process exit code: 0 success, 1 I/O failure, 2 validation
// error (including unknown commands and bad flags), 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ssp::cli
