#pragma once

#include <ostream>

namespace resalloc::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kDiverged = 2 };

/// Whole command line front end; main() only forwards to it.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace resalloc::cli
