#pragma once

#include <ostream>

namespace seqfdr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Entry point of the `seqfdr` command line tool (subcommands run,
/// calibrate, reproduce, sweep).  Reports go to `out` unless --out names a
/// file; diagnostics go to `err`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqfdr::cli
