#ifndef FHQ_CLI_HPP
#define FHQ_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace fhq {

/// Parses `args` (without the program name) and runs the chosen subcommand.
/// Returns the process exit status; diagnostics go to `err`.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace fhq

#endif  // FHQ_CLI_HPP
