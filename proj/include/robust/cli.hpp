#pragma once

#include "robust/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace robust {

/// Process exit status for a library error: 2 bad input, 3 IO/parse, 4 numerical failure.
int exit_code_for(ErrorCode code);

/// Entry point of the robust_estim tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robust
