#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wgdmp::cli {

/// Exit codes: 0 success / all conditions hold, 1 a condition or verdict
/// failed, 2 bad input or a library error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wgdmp::cli
