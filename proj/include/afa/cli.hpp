#pragma once

// Command-line front end. Exit codes: 0 answered, 1 usage or parse error,
// 2 budget exhausted.

#include <iosfwd>
#include <string>
#include <vector>

namespace afa::cli {

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace afa::cli
