#pragma once

#include <string>
#include <vector>

namespace evigrid::cli {

// Runs one pipeline command; args exclude the program name. Returns the
// process exit code: 0 on success, 2 on usage errors, 1 on any other failure
// (a one-line JSON error is printed to stderr).
int run(const std::vector<std::string>& args);

}  // namespace evigrid::cli
