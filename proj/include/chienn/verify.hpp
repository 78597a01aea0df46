#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace chienn {

struct PropertyResult {
    std::string name;
    long passed = 0;
    long total = 0;
    std::string detail;

    bool ok() const { return passed == total && total > 0; }
};

struct VerifyReport {
    std::vector<PropertyResult> results;

    bool all_ok() const {
        for (const auto& r : results)
            if (!r.ok()) return false;
        return !results.empty();
    }
};

// Runs every invariant/property suite once: geometry (SE(3), mirror
// reversal, conformer rotation), edge-graph oracle agreement, aggregation
// shift-invariance and order-sensitivity, k=1 and linear-psi collapses,
// gradient checks, oracle antisymmetry, and determinism of the pipeline.
// `trials` scales the per-suite draw counts (1.0 = the full counts).
VerifyReport run_verification(std::uint64_t seed, double trials = 1.0);

// One line per property: "PASS|FAIL name (passed/total) detail".
void print_report(const VerifyReport& report, std::ostream& os);

}  // namespace chienn
