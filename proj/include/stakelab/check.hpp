#pragma once
// Acceptance suites: exact-oracle equalities plus statistically-toleranced
// reproduction of the limit theorems at fixed seeds. `check all` also runs
// the thread-invariance criterion. Reports carry no timing, so equal
// configurations produce byte-identical reports.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace stakelab {

enum class Suite { Oracle, Bounds, Limits, Dilution, All };

Suite suite_from_name(const std::string& name);
std::string suite_name(Suite s);

struct CheckOptions {
    double scale = 1.0;  // thins replicate counts (statistical criteria only)
    std::uint64_t seed = 20240817ULL;
};

struct CriterionResult {
    std::string id;
    std::string description;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    nlohmann::json details;
};

struct CheckReport {
    std::string suite;
    double scale = 1.0;
    std::uint64_t master_seed = 0;
    std::vector<CriterionResult> criteria;

    bool all_pass() const;
    nlohmann::json to_json() const;
    // One line per criterion: "[PASS|FAIL] id: description (measured=..., tol=...)"
    std::string text_summary() const;
};

CheckReport run_suite(Suite suite, const CheckOptions& opt);

}  // namespace stakelab
