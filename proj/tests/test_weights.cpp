#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "torrank/weights.hpp"

using namespace torrank;

TEST_CASE("weight table examples") {
    PrimeModulus p5(5), p7(7);
    auto t7 = build_weight_table(Group::Z7, p5);
    CHECK(t7.at(2, 1) == 0);
    CHECK(t7.at(2, 4) == 12);
    CHECK(build_weight_table(Group::Z2, p7).at(0, 1) == 3);
    for (Group G : all_groups())
        for (i64 p : primes_between(5, 200)) {
            const i64 w00 = static_cast<i64>(build_weight_table(G, PrimeModulus(p)).at(0, 0));
            // when p divides |G| a whole line of I maps to (0, 0)
            CHECK(w00 == (torsion_group(G).order() % p == 0 ? p : 1));
        }
}

TEST_CASE("weights sum to p^2 and worker stripes agree") {
    for (Group G : all_groups())
        for (i64 p : primes_between(5, 60)) {
            PrimeModulus pm(p);
            auto t = build_weight_table(G, pm);
            CHECK(t.total() == static_cast<u64>(p * p));
            if (p == 31) CHECK(build_weight_table(G, pm, 4).w == t.w);
        }
}

TEST_CASE("singular weight sums match the table rows") {
    CHECK(singular_weight_sum(Group::Z2, PrimeModulus(7)) == 13);
    CHECK(singular_weight_sum(Group::Z8, PrimeModulus(7)) == 37);
    CHECK(singular_weight_sum(Group::Z12, PrimeModulus(13)) == 121);
    int rows = 0;
    for (Group G : nontrivial_groups())
        for (i64 p : primes_between(5, 60)) {
            auto e = expected_singular_sum(G, p);
            if (!e) continue;
            ++rows;
            CAPTURE(torsion_group(G).label);
            CAPTURE(p);
            CHECK(singular_weight_sum(G, PrimeModulus(p)) == *e);
        }
    CHECK(rows > 180);
    CHECK_FALSE(expected_singular_sum(Group::Z5, 5).has_value());
    CHECK_FALSE(expected_singular_sum(Group::Z7, 7).has_value());
    CHECK_FALSE(expected_singular_sum(Group::Z2xZ8, 7).has_value());
}

TEST_CASE("Z/3 bias over squares") {
    CHECK(split_bias_sum(PrimeModulus(13)) == 24);
    CHECK(split_bias_sum(PrimeModulus(7)) == 0);
    CHECK(split_bias_sum(PrimeModulus(5)) == 4);
    for (i64 p : primes_between(5, 100)) CHECK(split_bias_sum(PrimeModulus(p)) == expected_split_bias(p));
}

TEST_CASE("Z/3 weight mass by reduction type") {
    // the split set is {alpha : 3 alpha square}; at p = 7 mod 12 it carries all 2(p-1)
    for (i64 p : primes_between(5, 100)) {
        auto r = reduction_weights(build_weight_table(Group::Z3, PrimeModulus(p)));
        CHECK(r.additive == 1);
        CHECK(r.split + r.nonsplit == 2 * (p - 1));
        const i64 m = p % 12;
        if (m == 1 || m == 7) {
            CHECK(r.split == 2 * (p - 1));
        } else {
            CHECK(r.split == p - 1);
        }
    }
}

TEST_CASE("positive weight iff G embeds, and weight = embedding count") {
    const Group gs[] = {Group::Z2, Group::Z3, Group::Z4, Group::Z5, Group::Z6, Group::Z2xZ2, Group::Z2xZ4};
    for (i64 p : primes_between(5, 50)) {
        PrimeModulus pm(p);
        std::vector<GroupShape> shape(static_cast<std::size_t>(p * p));
        for (i64 A = 0; A < p; ++A)
            for (i64 B = 0; B < p; ++B) {
                CurveModP c(A, B, pm);
                if (!c.singular()) shape[static_cast<std::size_t>(A * p + B)] = group_structure(c);
            }
        for (Group G : gs) {
            if (p % torsion_group(G).order() == 0) continue;
            auto t = build_weight_table(G, pm);
            int bad = 0, badcount = 0;
            for (i64 A = 0; A < p; ++A)
                for (i64 B = 0; B < p; ++B) {
                    if (CurveModP(A, B, pm).singular()) continue;
                    const auto& s = shape[static_cast<std::size_t>(A * p + B)];
                    if ((t.at(A, B) > 0) != torsion_embeds(s, G)) ++bad;
                    if (static_cast<i64>(t.at(A, B)) != embedding_count(s, G)) ++badcount;
                }
            CAPTURE(torsion_group(G).label);
            CAPTURE(p);
            CHECK(bad == 0);
            CHECK(badcount == 0);
        }
    }
}

TEST_CASE("class numbers") {
    PrimeModulus p7(7);
    auto row = class_numbers(Group::Z2, p7);
    CHECK(row.total() == 36);
    CHECK(moment_sum(row, 0) == 36);
    CHECK(row.at(-row.amax - 1) == 0);
    CHECK(row.at(100) == 0);
    for (i64 p : primes_between(5, 100)) {
        PrimeModulus pm(p);
        TraceTable tt(pm);
        for (Group G : nontrivial_groups()) {
            auto t = build_weight_table(G, pm);
            auto r = class_numbers(t, tt);
            CHECK(r.amax * r.amax < 4 * p);
            CHECK((r.amax + 1) * (r.amax + 1) > 4 * p);
            CHECK(r.total() == p * p - singular_weight_sum(t));
        }
        auto r2 = class_numbers(build_weight_table(Group::Z2, pm), tt);
        for (i64 a = 0; a <= r2.amax; ++a) CHECK(r2.at(a) == r2.at(-a));
    }
}

TEST_CASE("odd moments vanish for Z/2 and 2x2") {
    for (i64 p : primes_between(5, 100)) {
        PrimeModulus pm(p);
        TraceTable tt(pm);
        for (Group G : {Group::Z2, Group::Z2xZ2}) {
            auto row = class_numbers(build_weight_table(G, pm), tt);
            for (int R : {1, 3, 5, 7}) CHECK(moment_sum(row, R) == 0);
        }
    }
}

TEST_CASE("scaled moment errors stay bounded") {
    // bounds are twice the maxima observed over 5 <= p <= 500
    struct Bound {
        Group G;
        double c0, c1, c2;
    };
    const Bound bounds[] = {{Group::Z2, 4.0, 1e-12, 1.9},
                            {Group::Z3, 4.0, 1.3, 1.9},
                            {Group::Z4, 6.0, 1.44, 2.76},
                            {Group::Z2xZ2, 6.0, 1e-12, 2.76}};
    for (i64 p : primes_between(5, 500)) {
        PrimeModulus pm(p);
        TraceTable tt(pm);
        const double P = static_cast<double>(p);
        for (const auto& b : bounds) {
            auto row = class_numbers(build_weight_table(b.G, pm), tt);
            const i128 pp = static_cast<i128>(p) * p;
            CHECK(std::fabs(static_cast<double>(moment_sum(row, 0) - pp)) / P <= b.c0);
            CHECK(std::fabs(static_cast<double>(moment_sum(row, 1))) / std::pow(P, 1.5) <= b.c1);
            CHECK(std::fabs(static_cast<double>(moment_sum(row, 2) - pp * p)) / std::pow(P, 2.5) <= b.c2);
        }
    }
}

TEST_CASE("Chebyshev") {
    CHECK(chebyshev_U(0, 5, 7) == 1);
    CHECK(chebyshev_U(1, 5, 7) == 5);
    CHECK(chebyshev_U(2, 5, 7) == 18);
    CHECK(chebyshev_coeff(2, 0) == 1);
    CHECK(chebyshev_coeff(3, 1) == 2);
    CHECK_THROWS(chebyshev_coeff(3, 2));
    CHECK_THROWS(chebyshev_coeff(4, -1));
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const i128 t = static_cast<i128>(rng() % 41) - 20;
        const i128 q = static_cast<i128>(rng() % 30) + 1;
        for (int R = 0; R <= 8; ++R) {
            i128 rhs = 0;
            for (int j = 0; j <= R / 2; ++j) rhs += chebyshev_coeff(R, j) * checked_pow(q, j) * chebyshev_U(R - 2 * j, t, q);
            CHECK(rhs == checked_pow(t, static_cast<unsigned>(R)));
        }
        // closed form (alpha^{k+1} - conj^{k+1}) / (alpha - conj) via the real recurrence
        const double tq = static_cast<double>(t), qq = static_cast<double>(q);
        const double disc = tq * tq - 4 * qq;
        if (disc < 0) {
            const double th = std::acos(tq / (2 * std::sqrt(qq)));
            for (int k = 0; k <= 6; ++k) {
                const double v = std::pow(qq, k / 2.0) * std::sin((k + 1) * th) / std::sin(th);
                CHECK(static_cast<double>(chebyshev_U(k, t, q)) == doctest::Approx(v).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("expectation oracle") {
    for (i64 p : primes_between(5, 30)) {
        PrimeModulus pm(p);
        TraceTable tt(pm);
        CHECK(expectation(tt, 0, GroupShape{1, 1}) == Rational(1));
        if (p % 3 == 2)
            for (int R = 0; R < 4; ++R) CHECK(expectation(tt, R, GroupShape{3, 3}) == Rational(0));
        // sum a^R H_2 = p(p-1) [E(a^R Phi_{Z/2}) + 2 E(a^R Phi_{2x2})]
        auto row = class_numbers(build_weight_table(Group::Z2, pm), tt);
        for (int R = 0; R <= 4; ++R) {
            Rational rhs = Rational(static_cast<i128>(p) * (p - 1)) *
                           (expectation(tt, R, GroupShape{2, 1}) + Rational(2) * expectation(tt, R, GroupShape{2, 2}));
            CHECK(rhs == Rational(moment_sum(row, R)));
        }
    }
    CHECK_THROWS(expectation(PrimeModulus(5), 0, GroupShape{5, 1}));
}

TEST_CASE("Hurwitz class numbers") {
    CHECK(hurwitz_H(-3) == Rational(1, 3));
    CHECK(hurwitz_H(-4) == Rational(1, 2));
    CHECK(hurwitz_H(-23) == Rational(3));
    CHECK(hurwitz_H(-12) == Rational(4, 3));
    CHECK(hurwitz_H(-16) == Rational(3, 2));
    CHECK_THROWS(hurwitz_H(-5));
    CHECK_THROWS(hurwitz_H(0));
    CHECK_THROWS(hurwitz_H(4));
    // Kronecker-Hurwitz: sum over |t| < 2 sqrt p of H(t^2 - 4p) = 2p
    for (i64 p : primes_between(3, 500)) {
        Rational s(0);
        for (i64 t = -2 * p; t <= 2 * p; ++t)
            if (t * t < 4 * p) s += hurwitz_H(t * t - 4 * p);
        CHECK(s == Rational(2 * p));
    }
}

TEST_CASE("Z/2 and 2x2 class numbers through Hurwitz") {
    for (i64 p : primes_between(5, 100)) {
        PrimeModulus pm(p);
        TraceTable tt(pm);
        auto r2 = class_numbers(build_weight_table(Group::Z2, pm), tt);
        auto r22 = class_numbers(build_weight_table(Group::Z2xZ2, pm), tt);
        const Rational half(p - 1, 2);
        for (i64 a = -r2.amax; a <= r2.amax; ++a) {
            CHECK(Rational(r2.at(a)) == half * (schoof_N2(a, p) + Rational(2) * schoof_N2x2(a, p)));
            CHECK(Rational(r22.at(a)) == Rational(6) * half * schoof_N2x2(a, p));
        }
    }
}

TEST_CASE("TSV export") {
    PrimeModulus p5(5);
    auto t = build_weight_table(Group::Z7, p5);
    auto s = weight_table_tsv(t);
    CHECK(s.find("7\t5\t2\t4\t12\n") != std::string::npos);
    CHECK(s.find("7\t5\t2\t1\t") == std::string::npos);
    CHECK(weight_table_tsv(t, false).find("7\t5\t2\t1\t0\n") != std::string::npos);
    auto row = class_numbers(Group::Z2, PrimeModulus(7));
    auto c = class_number_tsv(row);
    CHECK(c.rfind("2\t7\t-5\t", 0) == 0);
    CHECK(std::count(c.begin(), c.end(), '\n') == 11);
}
