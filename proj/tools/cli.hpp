// Command-line front end. Exit codes: 0 success or pass, 1 property
// violation (a witness is printed), 2 usage, input or file error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace alqe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace alqe::cli
