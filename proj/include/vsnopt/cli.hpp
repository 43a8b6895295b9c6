#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vsnopt {

// Command-line front end. Exit codes: 0 success, 1 infeasible result or
// failed validation, 2 usage, parse, or I/O errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vsnopt
