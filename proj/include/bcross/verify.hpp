#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcross/montecarlo.hpp"

namespace bcross {

struct CheckResult {
    std::string name;
    bool passed;
    double value;       ///< the measured deviation or statistic
    double tolerance;   ///< threshold the value was held to
    std::string detail;
};

struct VerifyOptions {
    bool include_mc = false;
    /// Adds the reflected log-remaining barrier, whose boundedness check is
    /// expected to fail.
    bool mirrored = false;
    McConfig mc{1000000, 4096, 42, true};
};

/// Identity, closed-form and finite-difference checks over the shipped
/// families, optionally followed by Monte Carlo agreement checks.
std::vector<CheckResult> run_verification(const VerifyOptions& opts);

}  // namespace bcross
