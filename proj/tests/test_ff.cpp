#include <set>

#include "doctest.h"
#include "torrank/ff.hpp"

using namespace torrank;

TEST_CASE("legendre examples") {
    PrimeModulus p7(7);
    CHECK(legendre(0, p7) == 0);
    CHECK(legendre(1, p7) == 1);
    CHECK(legendre(3, p7) == -1);
    CHECK(legendre(-1, p7) == -1);
    CHECK(legendre(14, p7) == 0);
}

TEST_CASE("prime modulus rejects composites and small primes") {
    CHECK_THROWS(PrimeModulus(3));
    CHECK_THROWS(PrimeModulus(9));
    CHECK_THROWS(PrimeModulus(-7));
    CHECK_NOTHROW(PrimeModulus(5));
}

TEST_CASE("legendre equals Euler criterion") {
    for (i64 p : primes_between(5, 200)) {
        PrimeModulus pm(p);
        for (i64 x = 1; x < p; ++x) {
            i64 e = powmod(x, static_cast<u64>((p - 1) / 2), p);
            CHECK(legendre(x, pm) == (e == 1 ? 1 : -1));
        }
    }
}

TEST_CASE("sqrt_mod examples") {
    PrimeModulus p7(7);
    CHECK(sqrt_mod(0, p7) == 0);
    CHECK(sqrt_mod(2, p7) == 3);
    CHECK_FALSE(sqrt_mod(3, p7).has_value());
}

TEST_CASE("sqrt_mod canonical roots") {
    // includes p = 1 mod 8 primes, where the general branch runs several rounds
    for (i64 p : primes_between(5, 400)) {
        PrimeModulus pm(p);
        for (i64 x = 0; x < p; ++x) {
            auto r = sqrt_mod(x, pm);
            CHECK(r.has_value() == (legendre(x, pm) >= 0));
            if (r) {
                CHECK(mulmod(*r, *r, p) == x);
                CHECK(*r >= 0);
                CHECK(*r <= (p - 1) / 2);
            }
        }
    }
}

TEST_CASE("is_cube on residues matches enumeration") {
    PrimeModulus p7(7);
    CHECK(is_cube(1, p7));
    CHECK_FALSE(is_cube(2, p7));
    CHECK(is_cube(6, p7));
    CHECK_THROWS(is_cube(0, p7));
    for (i64 p : primes_between(5, 100)) {
        PrimeModulus pm(p);
        std::set<i64> cubes;
        for (i64 y = 1; y < p; ++y) cubes.insert(mulmod(mulmod(y, y, p), y, p));
        for (i64 x = 1; x < p; ++x) CHECK(is_cube(x, pm) == (cubes.count(x) == 1));
    }
}

namespace {
std::set<std::pair<i64, i64>> ring_cubes(PrimeModulus pm, i64& units) {
    std::set<std::pair<i64, i64>> out;
    units = 0;
    for (i64 u = 0; u < pm.p; ++u)
        for (i64 v = 0; v < pm.p; ++v) {
            QuadExt y{u, v};
            if (!qe_is_unit(y, pm)) continue;
            ++units;
            QuadExt c = qe_mul(qe_mul(y, y, pm), y, pm);
            out.insert({c.u, c.v});
        }
    return out;
}
}  // namespace

TEST_CASE("is_cube in F_p[sqrt(-3)] matches enumeration of the unit group") {
    for (i64 p : primes_between(5, 50)) {
        PrimeModulus pm(p);
        i64 units = 0;
        auto cubes = ring_cubes(pm, units);
        CHECK(units == (p % 3 == 1 ? (p - 1) * (p - 1) : p * p - 1));
        for (i64 u = 0; u < p; ++u)
            for (i64 v = 0; v < p; ++v) {
                QuadExt x{u, v};
                if (!qe_is_unit(x, pm)) {
                    CHECK_THROWS(is_cube(x, pm));
                    continue;
                }
                CHECK(is_cube(x, pm) == (cubes.count({u, v}) == 1));
            }
    }
}

TEST_CASE("gamma_7 at p = 13 against brute force") {
    PrimeModulus pm(13);
    i64 units = 0;
    auto cubes = ring_cubes(pm, units);
    // x^2 + 3 splits mod 13, so the unit group has 12^2 elements
    CHECK(units == 144);
    QuadExt g7 = qe_reduce({4 * 637, 4 * 147}, pm);
    CHECK(is_cube(g7, pm) == (cubes.count({g7.u, g7.v}) == 1));
}

TEST_CASE("gamma_7 and gamma_9 sign variants agree") {
    for (i64 p : primes_between(5, 300)) {
        PrimeModulus pm(p);
        if (p != 7) {
            QuadExt plus = qe_reduce({4 * 637, 4 * 147}, pm);
            QuadExt minus = qe_reduce({-4 * 637, 4 * 147}, pm);
            CHECK(is_cube(plus, pm) == is_cube(minus, pm));
        }
        QuadExt g9a = qe_reduce({-36, 12}, pm);
        QuadExt g9b = qe_reduce({-36, -12}, pm);
        CHECK(is_cube(g9a, pm) == is_cube(g9b, pm));
    }
}
