#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace devmodal::cli {

// Entry point shared by the binary and the tests. Exit codes: 0 all checks
// passed, 1 a theorem-level check failed (witness printed), 2 usage or
// parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace devmodal::cli
