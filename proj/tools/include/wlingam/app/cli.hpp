#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wlingam::app {

/// Runs one subcommand. Returns 0 on success, 1 on a validation failure and
/// 2 on a runtime failure; diagnostics go to `err`, results to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace wlingam::app
