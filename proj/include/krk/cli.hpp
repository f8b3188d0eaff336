#pragma once

#include <iosfwd>

namespace krk {

// Exit codes of the krk command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResource = 3;

// Runs `krk <subcommand> ...`. `in` feeds interactive play.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace krk
