#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fomip::cli {

// Runs one command (args exclude the program name) and returns the
// process exit code: 0 success/optimal, 1 infeasible, 2 input error,
// 3 resource or numerical limit.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fomip::cli
