#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sgmstream {

// Subcommands: match, sweep, estimate, eval.
// Exit codes: 0 success, 1 validation or usage error, 2 I/O error.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sgmstream
