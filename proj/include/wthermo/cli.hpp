#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wthermo {

// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitModel = 2,
  kExitBudget = 3,
  kExitConstraint = 4,
};

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace wthermo
