#pragma once

#include <iosfwd>

namespace lidarvt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/**
 * Entry point of the `lidarvt` tool, callable in-process.
 *
 * Subcommands: viz, tile, folds, eval, report, stats, synth. Global flags
 * --threads, --seed, --params and --quiet may appear before or after the
 * subcommand. Returns 0 on success, 1 when processing fails and 2 for bad
 * arguments. Informational output goes to `out`, warnings and errors to `err`.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lidarvt
