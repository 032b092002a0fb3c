#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tdh::cli {

/// Runs one subcommand (price, smile, calibrate, simulate, validate). args
/// excludes the program name. Returns 0 on success, 1 on an input error and 2
/// when validate finds a failing check.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdh::cli
