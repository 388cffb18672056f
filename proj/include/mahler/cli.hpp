#pragma once

// mahler-lab command-line frontend.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mahler/numerics.hpp"

namespace mahler::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;       // selftest failures, unexpected errors
inline constexpr int kBadConfig = 2;
inline constexpr int kResourceCap = 3;
inline constexpr int kUndecided = 4;

/// Arguments without the program name. Data goes to `out` (or --out),
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

std::uint64_t fnv1a(std::string_view bytes);

/// "2,4,8" or "a:b" (every integer) or "a:b:xr" (a, a r, a r^2, ... <= b).
std::vector<BigInt> expand_schedule(std::string_view text);

/// Scientific decimal with `digits` significant digits, rounded toward
/// +inf (up) or -inf.
std::string scientific(const Rational& v, bool up, int digits = 17);

}  // namespace mahler::cli
