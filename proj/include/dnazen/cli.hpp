#pragma once

#include <string>
#include <vector>

namespace dnazen::cli {

// Pipeline entry point. args excludes the program name. Returns the process
// exit code: 0 success, 1 validation or usage error, 2 runtime error.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace dnazen::cli
