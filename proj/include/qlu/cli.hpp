#ifndef QLU_CLI_HPP
#define QLU_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace qlu::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsageError = 2 };

/// Runs the command line `args` (without the program name). Tables and
/// reports go to `out`; usage and parameter errors are written to `err` as a
/// JSON error record.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qlu::cli

#endif
