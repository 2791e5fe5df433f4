#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spdicp::cli {

/// Default directory for output files when -o is not given.
inline constexpr const char* kOutputDirEnv = "SPDICP_OUTPUT_DIR";

/// Runs one command line (args[0] is the program name). Results go to `out`;
/// failures are reported on `err` as a single JSON object and yield a nonzero
/// return value.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spdicp::cli
