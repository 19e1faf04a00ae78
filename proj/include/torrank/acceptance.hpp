#pragma once

#include <functional>
#include <string>
#include <vector>

#include "torrank/census.hpp"

namespace torrank {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string summary;              // one line of measured values
    std::vector<std::string> detail;  // failing sub-checks, measurements
    double seconds = 0;
};

struct AcceptanceOptions {
    bool quick = false;  // p <= 30, X <= 1e6
    int workers = 1;
    std::string cache_dir;  // empty: no census persistence
    std::vector<int> only;  // empty: all fifteen
    std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);

// Loads <dir>/census-<G>-<X>.txt when present, else enumerates and saves it.
CensusResult cached_census(Group G, i128 X, const std::string& dir, int workers);

// "criterion 7 PASS Chebyshev expansion | R <= 8, 100 pairs"
std::string criterion_line(const CriterionResult& r);

}  // namespace torrank
