#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cryptkit::cli {

inline constexpr std::uint64_t kDefaultSeed = 20221;

/// Runs one command line (without the program name). Writes the result to
/// `out` and diagnostics to `err`. Returns 0 for ok or infeasible answers,
/// 1 for no-candidate or library errors, 2 for usage errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cryptkit::cli
