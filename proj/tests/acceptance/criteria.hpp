#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fibtrans::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    nlohmann::json data;
};

using Criterion = std::function<CriterionResult()>;

struct CriterionEntry {
    int id;
    std::string name;
    double budget_seconds;
    Criterion run;
};

const std::vector<CriterionEntry>& criteria();

/// Runs one criterion, timing it; an exception counts as a failure.
CriterionResult run_criterion(const CriterionEntry& entry);

/// One line per criterion.
std::string format_line(const CriterionResult& r);

}  // namespace fibtrans::acceptance
