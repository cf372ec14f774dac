#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sumrange {

struct BatteryOptions {
    unsigned jobs = 1;
    std::uint64_t seed = 7;
    std::size_t cases = 500;
};

struct CriterionResult {
    int number = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};

inline constexpr int kCriterionCount = 10;

/// Runs acceptance criterion 1..10. Exceptions are caught and reported as a failure.
CriterionResult run_criterion(int number, const BatteryOptions& options = {});

/// All criteria in order; progress is called after each one.
std::vector<CriterionResult> run_battery(const BatteryOptions& options = {},
                                         const std::function<void(const CriterionResult&)>& progress = {});

/// "criterion N: PASS|FAIL title (detail) [t s]"
void write_criterion_line(std::ostream& os, const CriterionResult& result);

} // namespace sumrange
