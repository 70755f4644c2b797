#pragma once

#include <iosfwd>

namespace pathbench::cli {

/// Exit codes of `run`.
inline constexpr int kOk = 0;
inline constexpr int kPartialWorkload = 1;
inline constexpr int kConfigError = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace pathbench::cli
