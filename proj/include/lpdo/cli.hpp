#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lpdo::cli {

/// Runs the command line given argv-style arguments (program name excluded).
/// Exit codes: 0 success; 1 obstructed / no factorization (the report is
/// still printed); 2 usage or parse error; 3 unresolved roots.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lpdo::cli
