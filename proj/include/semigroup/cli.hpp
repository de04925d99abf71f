// cli.hpp — semigroup-lab {extract|evolve|unravel|count|interfere|validate}
//
// Exit codes: 0 success, 1 validation failure, 2 input error, 3 numerical error.

#pragma once

#include <iosfwd>

namespace semigroup {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitInput = 2,
    kExitNumerical = 3,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace semigroup
