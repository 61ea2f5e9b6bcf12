#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stakepool::cli {

enum ExitCode : int { ok = 0, input_error = 2, premise_unmet = 3, verification_failed = 4 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stakepool::cli
