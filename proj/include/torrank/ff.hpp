#pragma once

#include <optional>

#include "torrank/arith.hpp"

namespace torrank {

struct PrimeModulus {
    i64 p;
    explicit PrimeModulus(i64 value);  // prime, >= 5
    operator i64() const { return p; }
};

int legendre(i64 x, PrimeModulus p);

// Root in [0, (p-1)/2] when x is a square.
std::optional<i64> sqrt_mod(i64 x, PrimeModulus p);

// u + v*s with s^2 = -3, in F_p[x]/(x^2+3).
struct QuadExt {
    i64 u = 0;
    i64 v = 0;
    friend bool operator==(const QuadExt&, const QuadExt&) = default;
};

QuadExt qe_reduce(QuadExt x, PrimeModulus p);
QuadExt qe_mul(QuadExt x, QuadExt y, PrimeModulus p);
QuadExt qe_pow(QuadExt x, u64 e, PrimeModulus p);
i64 qe_norm(QuadExt x, PrimeModulus p);
bool qe_is_unit(QuadExt x, PrimeModulus p);

bool is_cube(i64 x, PrimeModulus p);
bool is_cube(QuadExt x, PrimeModulus p);

}  // namespace torrank
