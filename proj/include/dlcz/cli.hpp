#pragma once

#include <ostream>

namespace dlcz {

/// Entry point of the dlczsim command line. Returns the process exit code:
/// 0 success, 2 configuration or usage error, 3 analytic backend outside its
/// regime, 4 I/O error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dlcz
