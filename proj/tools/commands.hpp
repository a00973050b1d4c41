#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oqmetro::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStatistical = 3;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Data goes to `out` unless --out is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oqmetro::cli
