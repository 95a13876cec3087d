#ifndef SNBCLUST_CLI_HPP
#define SNBCLUST_CLI_HPP

#include <string>
#include <vector>

namespace snbclust::cli {

// Exit codes: 0 ok, 1 unexpected, 2 parse, 3 validation, 4 numeric.
constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;

/// Runs the command line given argv-style arguments (excluding the program
/// name). All output goes to the given directory/stdout; errors are printed
/// to stderr and mapped to the exit codes above.
int run(const std::vector<std::string>& args);

}  // namespace snbclust::cli

#endif
