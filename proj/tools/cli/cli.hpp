#pragma once

#include <string>
#include <vector>

namespace annimpute::cli {

// Exit codes: 0 success, 1 usage, 2 data, 3 numeric failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace annimpute::cli
