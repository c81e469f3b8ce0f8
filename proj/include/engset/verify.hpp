#pragma once

#include <string>
#include <vector>

namespace engset {

/// Outcome of one invariant suite: how many checks passed and the worst
/// metric seen against its tolerance.
struct SuiteReport {
    std::string name;
    long passed = 0;
    long failed = 0;
    double worst = 0.0;
    double tolerance = 0.0;
    /// Descriptions of the first few failing checks.
    std::vector<std::string> failures;
};

/// Deterministic invariant suites over small parameter grids (no simulation).
std::vector<SuiteReport> run_invariant_suites();

} // namespace engset
