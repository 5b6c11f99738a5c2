#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cost::cli {

// Runs the toolkit's command-line interface against explicit streams, so the
// whole surface is drivable in-process from tests. `args` excludes the
// program name. Returns the process exit code:
//   0 success, 1 usage error, 2 data error, 3 verification failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cost::cli
