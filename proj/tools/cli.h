#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lsr::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kInternalError = 3;

// Runs the `lsr` command line. Results go to `out` (or to -o files), the
// training log and warnings to `err`. Failures print one line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsr::cli
