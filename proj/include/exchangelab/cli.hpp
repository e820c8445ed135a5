#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace exchangelab {

// Command-line front end. args excludes the program name. Exit codes:
// 0 success, 1 operational error (bad input, unmet precondition),
// 2 certified finding (failed validation, violation row, witness found,
// exchangeability violated, rejected moment certificate).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace exchangelab
