#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace engset::cli {

/**
 * Runs one command line (without the program name). Documents go to `out`
 * (or to --output), messages to `err`. Returns 0 on success, 1 on a usage
 * error and 2 on a numerical failure.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace engset::cli
