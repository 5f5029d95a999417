#ifndef EDGECORR_TOOLS_CLI_HPP
#define EDGECORR_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace edgecorr::cli {

enum ExitCode { kOk = 0, kUsage = 1, kComputation = 2 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edgecorr::cli

#endif  // EDGECORR_TOOLS_CLI_HPP
