#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lrexp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

inline constexpr unsigned long long kDefaultSeed = 20240917;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lrexp::cli
