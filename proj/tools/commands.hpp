#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tpc::cli {

/// Runs one invocation. `args` excludes the program name. Returns the
/// process exit code: 0 on success, 1 on bad input, 2 when `reproduce`
/// finds a mismatch.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace tpc::cli
