#pragma once

#include <ostream>

namespace pfs::cli {

/// Exit codes: 0 success, 1 a negative verdict (attack stopped, keys differ),
/// 2 usage, parse or I/O errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitError = 2;

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pfs::cli
