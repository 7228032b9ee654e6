#pragma once

namespace steinpair {

/// Closed-form conditional moments of Delta = W - W' given the full
/// configuration, at the configuration's W value.
struct CondStats {
    double w = 0.0;      // statistic W at this configuration
    double ed = 0.0;     // E(Delta   | X)
    double ed2 = 0.0;    // E(Delta^2 | X)
    double edabs = 0.0;  // E(Delta |Delta| | X)
    double ed3 = 0.0;    // E(Delta^3 | X)

    /// Throws std::logic_error when a kernel violates ed2 >= 0,
    /// |edabs| <= ed2 or |ed| <= sqrt(ed2) (beyond rounding slack).
    void validate() const;
};

}  // namespace steinpair
