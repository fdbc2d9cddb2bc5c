#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sfpl {

/// Entry point of the `sfpl` command line tool. Returns the process exit status;
/// diagnostics go to `err`, progress and results to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sfpl
