#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rgseg::cli {

/// Runs one `rgseg` invocation. `args` excludes the program name. Returns
/// the process exit status; logs go to `err`, help text to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rgseg::cli
