#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gbk::cli {

/// Runs one command; args excludes the program name. Returns 0, 1 (compute failure) or 2 (usage).
/// Artifacts go to `out` unless -o names a file; diagnostics go to `err`.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

} // namespace gbk::cli
