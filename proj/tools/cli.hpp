#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tve {

/// Entry point of the command-line tool. Exit codes: 0 success, 1 runtime error, 2 invalid input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace tve
