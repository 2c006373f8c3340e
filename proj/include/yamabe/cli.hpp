#ifndef YAMABE_CLI_HPP
#define YAMABE_CLI_HPP

namespace yamabe::cli {

/// Full command-line front end (solve / sweep / verify / completeness /
/// curvature). Returns the process exit code: 0 success, 1 runtime or
/// tolerance failure, 2 usage or config error.
int run(int argc, const char* const* argv);

} // namespace yamabe::cli

#endif
