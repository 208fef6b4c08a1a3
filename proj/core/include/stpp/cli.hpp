#pragma once

#include <string>
#include <vector>

namespace stpp {

// Exit codes: 0 success, 1 validation failure, 2 infeasible instance,
// 3 timed out without an incumbent. Errors are also mirrored as one JSON
// line on stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace stpp
