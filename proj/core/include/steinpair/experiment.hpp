#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace steinpair {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flag overrides on top of the config file; the STEINPAIR_OUT environment
/// variable sits between config value and --out flag.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
    bool check = false;  // enforce the config's check block / bound validity
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCheckFailed = 3;

/// Runs one experiment from a JSON config file. Modes: rates, bound,
/// diagnose, target-table. Returns a process exit code.
int run_experiment_file(const std::string& config_path, const RunOptions& opts,
                        std::ostream& log);

/// Same, from an in-memory JSON string (used by tests).
int run_experiment_json(const std::string& config_text, const RunOptions& opts,
                        std::ostream& log);

/// Stable FNV-1a hash of the canonicalized config, stamped into every row.
std::string config_hash_hex(const std::string& canonical_text);

}  // namespace steinpair
