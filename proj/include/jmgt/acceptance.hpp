#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace jmgt {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::string detail;
    /// Named numbers behind the verdict, in evaluation order.
    std::vector<std::pair<std::string, double>> metrics;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240611;
    /// Path of the jmgt executable. Criterion 11 runs it as a subprocess when
    /// set and falls back to in-process runs otherwise.
    std::string cli;
    /// Scratch space for criterion 11; a fresh directory under the system
    /// temp path when empty.
    std::string work_dir;
};

constexpr int kCriterionCount = 11;

const char* criterion_title(int id);

/// Runs one criterion. Library exceptions are caught and reported as a
/// failure with the exception text in `detail`.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opt = {});

/// "[PASS] C7 <title> (2.1 s / 300 s): <detail>"
std::string format_result_line(const CriterionResult& r);

}  // namespace jmgt
