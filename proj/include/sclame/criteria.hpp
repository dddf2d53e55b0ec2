#pragma once

// Quantitative acceptance battery shared by the `certify suite` subcommand and
// the acceptance test binary.  Every tolerance is pinned here in code.

#include "sclame/report.hpp"

#include <string>
#include <vector>

namespace sclame {

struct CriteriaOptions {
    bool quick = false;          // reduced Monte-Carlo sample counts
    std::uint64_t seed = 20240615;
    int jobs = 1;
};

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    ordered_json details;        // deterministic payload (no timings)
};

CriterionResult run_criterion(int index, const CriteriaOptions& opts);
std::vector<CriterionResult> run_all_criteria(const CriteriaOptions& opts);

// Deterministic result payload of the full suite (identical bytes for
// identical options/seed).
ordered_json criteria_payload(const std::vector<CriterionResult>& results);

int criteria_count();

} // namespace sclame
