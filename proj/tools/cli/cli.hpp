#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace deskcech::cli {

// args excludes the program name. Exit codes: 0 pass, 1 check failure, 2 input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace deskcech::cli
