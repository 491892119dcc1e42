#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ccpath/simulation.hpp"

namespace ccpath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one command. `args` excludes the program name, e.g. {"fit", "data.csv"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Applies `key = value` overrides from a file to `base`. Keys are the
/// SimDesign field names (kind, rho, n, p, sigma, response, seed, test_size,
/// beta_head, block_divisor, name).
SimDesign read_design_file(const std::string& path, SimDesign base);

}  // namespace ccpath::cli
