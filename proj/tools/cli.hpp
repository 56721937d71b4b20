#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace conleg::cli {

// 12 significant digits, locale independent
std::string format_number(double v);

// full command line handling; returns the process exit code (0 ok, 2 bad input, 3 numerical failure)
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conleg::cli
