#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bosonsim::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kRuntimeFailure = 1,
  kParseError = 2,
  kValidationError = 3,
  kCompareFailed = 4,
};

/// Runs one command. argv[0] is the program name. Messages go to `err`, short summaries to
/// `out`; artifacts are written to the paths named in the arguments.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace bosonsim::cli
