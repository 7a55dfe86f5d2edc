#pragma once

#include <string>
#include <vector>

namespace twem {

// Entry point shared by the twem binary and the test harnesses. `args`
// excludes the program name. Returns the process exit code: 0 success,
// 1 usage error, 2 data/format error, 3 numeric/training error.
int run_cli(const std::vector<std::string>& args);

}  // namespace twem
