#pragma once

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "torrank/arith.hpp"
#include "torrank/curve_local.hpp"
#include "torrank/torsion_models.hpp"

namespace torrank {

struct CurveQ {
    i128 A;
    i128 B;
    friend auto operator<=>(const CurveQ&, const CurveQ&) = default;
};

// max(|A|^3, B^2) <= X
bool height_at_most(i128 A, i128 B, i128 X);
bool is_minimal(i128 A, i128 B);
bool is_singular(i128 A, i128 B);

// 1/d(G); 5/6 for the trivial group.
double count_exponent(Group G);

// "1e8", "100000000", "2.5e9" -> exact integer
i128 parse_height(const std::string& s);

struct RegionArea {
    Group G;
    double area;
    double tolerance;
    double amax;  // extents of R_G(1)
    double bmax;
};

struct RegionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RegionArea region_area(Group G, double tol = 1e-4);
// Midpoint-grid quadrature of R_G(1) with n x n cells, for cross-checks.
double region_area_grid(Group G, int n);
// Integer points of R_G(X), no parity or coprimality condition.
i64 count_region_points(Group G, i128 X);

// Distribution of the defect over coprime pairs, by l-adic lifting at l = 2, 3, 5, 7.
struct DefectStats {
    Group G;
    std::map<i64, double> distribution;  // e -> density
    double mean_weight;                  // E[e^{12/d}]
    i64 eps_max;
};
DefectStats defect_statistics(Group G);

double c_constant(Group G, double tol = 1e-4);

struct CensusResult {
    Group G;
    i128 X = 0;
    std::vector<CurveQ> curves;            // sorted by (A, B)
    std::map<i64, i64> multiplicity;       // exact preimage count -> number of curves
    i64 pairs_scanned = 0;
    i64 singular_images = 0;
    i64 box_a = 0;
    i64 box_b = 0;

    std::size_t size() const { return curves.size(); }
};

// RegionError if the scanned box does not close around the region.
CensusResult enumerate(Group G, i128 X, int workers = 1);
i64 modal_multiplicity(const CensusResult& c);

enum class LocalKind { Good, Trace, Split, Nonsplit, Mult, Additive, Semistable };

struct LocalCondition {
    LocalKind kind = LocalKind::Good;
    i64 a = 0;  // Trace only
    std::string str() const;
    friend bool operator==(const LocalCondition&, const LocalCondition&) = default;
};

LocalCondition parse_local_condition(const std::string& s);
bool satisfies(const LocalData& ld, const LocalCondition& lc);

// Local data of every census curve at p, in census order.
std::vector<LocalData> local_data(const CensusResult& c, i64 p, ApCache* cache = nullptr);

// Limit density of lc at p among curves of E_G(X).
double predicted_density(Group G, i64 p, const LocalCondition& lc);

struct DensityReport {
    i64 count = 0;
    i64 total = 0;
    double density = 0;
    double predicted = 0;
    double tolerance = 0;  // on |density/predicted - 1|
    bool ok = false;
};

DensityReport local_density(const CensusResult& c, i64 p, const LocalCondition& lc);
DensityReport local_density(const CensusResult& c, const std::vector<LocalData>& data, i64 p,
                            const LocalCondition& lc);

// predicted = product of the empirical marginals
DensityReport joint_density(const CensusResult& c, const std::vector<std::pair<i64, LocalCondition>>& conds);

struct CheckLine {
    std::string name;
    double observed;
    double expected;
    double tolerance;
    bool ok;
};

// Multiplicative weight mass / (p - 1) from the weight table.
double mult_weight_ratio(Group G, i64 p);

std::vector<CheckLine> corollary_checks(const std::map<Group, CensusResult>& censuses,
                                        const std::vector<i64>& primes);

// "A B" lines; sidecar JSON at path + ".json"
void save_census(const CensusResult& c, const std::string& path);
CensusResult load_census(const std::string& path);

// "G X p condition count predicted"
std::string tally_tsv(const CensusResult& c, i64 p, const std::vector<LocalCondition>& conds);

}  // namespace torrank
