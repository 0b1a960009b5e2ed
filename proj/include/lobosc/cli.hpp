#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lobosc::cli {

// Full command-line entry point; argv-style arguments without the program
// name.  Data goes to `out` (or files), diagnostics to `err`.  Returns the
// process exit code: 0 success, 1 usage or I/O problem, 2 computation or
// consistency failure, 3 self-verification failure.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace lobosc::cli
