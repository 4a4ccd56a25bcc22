#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fframes::cli {

/// Runs one batch command (verb + flags, program name excluded).
/// Exit status: 0 on pass, 1 on any identity or classification failure,
/// 2 on input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fframes::cli
