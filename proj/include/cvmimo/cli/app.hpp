#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cvmimo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Entry point of the cvmimo tool: run | sweep | gradcheck | complexity |
// validate-config. Results go to `out`, log lines and errors to `err`.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvmimo
