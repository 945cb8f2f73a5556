#pragma once

#include <iosfwd>

namespace ddf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one subcommand. Returns 0 on success, 1 on a usage error and 2 on
/// a data error (unreadable or invalid input, failed check).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ddf::cli
