#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dioph::cli {

// Runs the command line tool. Exit codes: 0 = success / all checks pass,
// 1 = a verification check failed, 2 = configuration or infeasibility error.
// Accepts both `diophlab <command> ...` and `diophlab --command <command> ...`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace dioph::cli
