#pragma once

#include <cstdint>
#include <iosfwd>

namespace steinpair {

struct AcceptanceOptions {
    std::uint64_t seed = 424242;
    int workers = 0;  // <= 0: available parallelism
};

/// Runs the acceptance suite (one pass/fail line per criterion on `log`).
/// Returns the number of failed criteria.
int run_acceptance(const AcceptanceOptions& options, std::ostream& log);

}  // namespace steinpair
