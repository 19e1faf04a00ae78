#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "torrank/arith.hpp"
#include "torrank/curve_local.hpp"
#include "torrank/ff.hpp"
#include "torrank/torsion_models.hpp"

namespace torrank {

struct WeightTable {
    Group G;
    i64 p;
    std::vector<u64> w;  // w[A*p + B]

    u64 at(i64 A, i64 B) const { return w[static_cast<std::size_t>(mod(A, p) * p + mod(B, p))]; }
    u64 total() const;
};

WeightTable build_weight_table(Group G, PrimeModulus p, int workers = 1);

i64 singular_weight_sum(const WeightTable& t);
i64 singular_weight_sum(Group G, PrimeModulus p);

// The tabulated value for the row matching p, if p is admissible for G.
std::optional<i64> expected_singular_sum(Group G, i64 p);

struct ReductionWeights {
    i64 good = 0;
    i64 split = 0;
    i64 nonsplit = 0;
    i64 additive = 0;
};

// Weight mass by reduction type of E_J.
ReductionWeights reduction_weights(const WeightTable& t);

// Sum over alpha in the set of nonzero squares of w_{Z/3}(-3 alpha^2, 2 alpha^3).
i64 split_bias_sum(PrimeModulus p);
i64 expected_split_bias(i64 p);

// Everything derived from a weight table and the shared trace table of one prime.
struct ClassNumberRow {
    Group G;
    i64 p;
    i64 amax;             // floor(2 sqrt p)
    std::vector<i64> H;   // H[a + amax]

    i64 at(i64 a) const {
        return (a < -amax || a > amax) ? 0 : H[static_cast<std::size_t>(a + amax)];
    }
    i64 total() const;
};

ClassNumberRow class_numbers(const WeightTable& t, const TraceTable& traces);
ClassNumberRow class_numbers(Group G, PrimeModulus p);

i128 moment_sum(const ClassNumberRow& row, int R);
i128 moment_sum(Group G, PrimeModulus p, int R);

i128 chebyshev_U(int k, i128 t, i128 q);
i128 chebyshev_coeff(int R, int j);

// E_p(a^R Phi_A): A given as Z/n1 x Z/n2 with n2 | n1.
Rational expectation(const TraceTable& traces, int R, const GroupShape& A);
Rational expectation(PrimeModulus p, int R, const GroupShape& A);

Rational hurwitz_H(i64 D);

// Schoof counts used in the Z/2 and 2x2 class-number relations.
Rational schoof_N2(i64 a, i64 p);
Rational schoof_N2x2(i64 a, i64 p);

// TSV rows: "G p A B weight" and "G p a H".
std::string weight_table_tsv(const WeightTable& t, bool nonzero_only = true);
std::string class_number_tsv(const ClassNumberRow& row);

}  // namespace torrank
