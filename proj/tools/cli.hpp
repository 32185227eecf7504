#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tocc::cli {

/// Seed used when --seed is absent: $TOCC_SEED if set, else 1.
std::uint64_t default_seed();

/// Runs the tool with `args` (program name excluded). Returns the exit code;
/// failures print one line "error: <code>: <message>" to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tocc::cli
