#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "torrank/arith.hpp"
#include "torrank/torsion_models.hpp"

namespace torrank {

enum ExitCode { kOk = 0, kVerifyFailed = 1, kUsageError = 2 };

struct RunConfig {
    std::string command;
    std::vector<Group> groups;
    i128 X = 0;
    i64 p_lo = 0, p_hi = 0;  // empty range when p_lo > p_hi
    std::vector<i64> local;  // --local primes
    double tol = 1e-4;
    std::string out;
    std::string cache;
    int workers = 1;
    bool quick = false;
    // rank-bounds
    std::optional<std::pair<int, int>> moments;
    std::optional<std::string> tail;
    bool average = false;
    std::vector<int> criteria;  // verify --only
};

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// "a..b" or "p"
std::pair<i64, i64> parse_prime_range(const std::string& s);

// Throws UsageError on an invalid combination.
void validate(const RunConfig& cfg);

int cmd_weights(const RunConfig& cfg, std::ostream& out);
int cmd_census(const RunConfig& cfg, std::ostream& out);
int cmd_rank_bounds(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);

// Parses argv, dispatches, maps exceptions to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace torrank
