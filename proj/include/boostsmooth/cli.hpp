#pragma once

#include <iosfwd>

namespace boostsmooth::cli {

/// Entry point of the boostsmooth tool. Returns the process exit code:
/// 0 success, 2 input error, 3 numerical or construction error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace boostsmooth::cli
