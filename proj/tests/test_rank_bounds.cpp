#include <bit>
#include <cmath>

#include "doctest.h"
#include "torrank/rank_bounds.hpp"

using namespace torrank;

namespace {

mpq_class Q(long n, long d = 1) {
    mpq_class r(n, d);
    r.canonicalize();
    return r;
}

// Every S, and every even S2 inside it, enumerated as bit masks.
mpq_class moment_bound_subsets(Group G, int n) {
    const mpq_class inv = 1 / sigma_n(G, n);
    mpq_class total = 0;
    for (unsigned S = 0; S < (1u << n); ++S)
        for (unsigned S2 = S;; S2 = (S2 - 1) & S) {
            const int k = std::popcount(S2), s = std::popcount(S);
            if (k % 2 == 0) {
                mpq_class t = 1;
                for (int i = 0; i < n - s; ++i) t *= inv;
                for (int i = 0; i < s - k; ++i) t *= Q(1, 2);
                for (int i = 2; i <= k; ++i) t *= i;
                for (int i = 0; i < k / 2; ++i) t *= Q(1, 6);
                total += t;
            }
            if (S2 == 0) break;
        }
    return total;
}

}  // namespace

TEST_CASE("test function pair") {
    for (double s : {1.0, 1.0 / 9, 1.0 / 30}) {
        TestFunction f{s};
        CHECK(f.phi0() == doctest::Approx(s * s / 4));
        CHECK(f.phi(0) == doctest::Approx(s * s / 4));
        CHECK(f.phi(1e-6) == doctest::Approx(s * s / 4).epsilon(1e-6));
        CHECK(f.phi_hat(0) == doctest::Approx(s / 4));
        CHECK(f.phi_hat(s) == 0);
        CHECK(f.phi_hat(1.5 * s) == 0);
        CHECK(f.phi_hat(-s / 2) == doctest::Approx(s / 8));
        for (double x = -50; x <= 50; x += 0.37) CHECK(f.phi(x) >= 0);
    }
}

TEST_CASE("sigma derivation") {
    CHECK(sigma_for(Group::Z3) == Q(1, 18));
    CHECK(sigma_for(Group::Z4) == Q(1, 18));
    for (Group G : large_groups()) CHECK(sigma_for(G) == Q(1, 5 * torsion_group(G).d));
    auto d3 = sigma_derivation(Group::Z3);
    CHECK(d3.constraints.size() == 4);
    CHECK(d3.constraints[1].bound == Q(1, 10));
    for (int n = 1; n <= 12; ++n) {
        CHECK(sigma_n(Group::Z2, n) == Q(1, 9 * n));
        CHECK(sigma_n(Group::Z2xZ2, n) == Q(1, 10 * n));
        CHECK(sigma_2n(Group::Z2, n) == Q(1, 18 * n));
        CHECK(sigma_2n(Group::Z2xZ2, n) == Q(1, 20 * n));
    }
    CHECK_THROWS_AS(sigma_for(Group::Z2), UnsupportedBound);
    CHECK_THROWS_AS(sigma_for(Group::Trivial), UnsupportedBound);
    CHECK_THROWS_AS(sigma_n(Group::Z3, 1), UnsupportedBound);
    CHECK_THROWS_AS(sigma_n(Group::Z2, 0), std::invalid_argument);
}

TEST_CASE("average rank bounds") {
    for (Group G : large_groups()) CHECK(average_rank_bound(G) == Q(1, 2) + 5 * torsion_group(G).d);
    CHECK(average_rank_bound(Group::Z7) == Q(121, 2));
    CHECK(average_rank_bound(Group::Z3) == Q(37, 2));
    CHECK(average_rank_bound(Group::Z4) == Q(37, 2));
    CHECK(average_rank_bound(Group::Z2) == Q(19, 2));
    CHECK(average_rank_bound(Group::Z2xZ2) == Q(21, 2));
}

TEST_CASE("moment bound: size formula equals subset enumeration") {
    CHECK(moment_bound(Group::Z2, 1) == Q(19, 2));
    CHECK(moment_bound(Group::Z2xZ2, 1) == Q(21, 2));
    for (Group G : {Group::Z2, Group::Z2xZ2})
        for (int n = 1; n <= 6; ++n) CHECK(moment_bound(G, n) == moment_bound_subsets(G, n));
    // n = 2 by hand: 18^2 + 2*18*(1/2) + (1/4 + 1/3)
    CHECK(moment_bound(Group::Z2, 2) == Q(324 + 18) + Q(7, 12));
}

TEST_CASE("tail bound") {
    auto t = tail_bound(Group::Z2, 23);
    CHECK(t.bound == Q(7, 300));
    CHECK(t.n == 1);
    CHECK(t.C == Q(5, 18));
    auto u = tail_bound(Group::Z2xZ2, 25);
    CHECK(u.bound == Q(7, 300));
    CHECK(u.n == 1);
    CHECK(u.C == Q(1, 4));
    CHECK(t.bound.get_d() <= 0.0234 + 5e-4);
    CHECK_THROWS_AS(tail_bound(Group::Z2, 18), VacuousBound);
    CHECK_THROWS_AS(tail_bound(Group::Z2xZ2, 20), VacuousBound);
    CHECK_THROWS_AS(tail_bound(Group::Z3, 100), UnsupportedBound);
    // larger thresholds give smaller bounds
    mpq_class prev = tail_bound(Group::Z2, 19).bound;
    for (int a = 20; a <= 200; a += 7) {
        const mpq_class b = tail_bound(Group::Z2, a).bound;
        CHECK(b < prev);
        prev = b;
    }
    CHECK(tail_bound(Group::Z2, 200).n > 1);
}

TEST_CASE("normalized coefficients") {
    LocalData good{0, Reduction::Good, {}};
    CHECK(hat_a(good, 7, 2) == -2);
    CHECK(hat_a(good, 7, 1) == 0);
    CHECK(hat_a({0, Reduction::SplitMult, {}}, 7, 1) == doctest::Approx(1 / std::sqrt(7.0)));
    CHECK(hat_a({0, Reduction::NonsplitMult, {}}, 7, 1) == doctest::Approx(-1 / std::sqrt(7.0)));
    CHECK(hat_a({0, Reduction::NonsplitMult, {}}, 7, 2) == doctest::Approx(1 / 7.0));
    CHECK(hat_a({0, Reduction::Additive, {}}, 7, 1) == 0);
    CHECK(hat_a({0, Reduction::Additive, {}}, 7, 2) == 0);
    CHECK_THROWS_AS(hat_a(good, 7, 3), std::invalid_argument);
    for (i64 p : primes_between(2, 60))
        for (i64 A = -5; A <= 5; ++A)
            for (i64 B = -5; B <= 5; ++B) {
                if (4 * A * A * A + 27 * B * B == 0) continue;
                auto ld = local_reduction(A, B, p);
                if (ld.reduction != Reduction::Good) continue;
                const double h = hat_a(ld, p, 1);
                CHECK(std::fabs(h) <= 2);
                CHECK(hat_a(ld, p, 2) == doctest::Approx(h * h - 2));
            }
}

TEST_CASE("integral of |u| phi_hat^2") {
    for (double s : {1.0, 1.0 / 9, 1.0 / 10, 1.0 / 18, 0.37}) {
        CHECK(std::fabs(abs_u_phi_hat_sq(s) - std::pow(s, 4) / 96) < 1e-10);
        CHECK(std::fabs(abs_u_phi_hat_sq(s) - std::pow(TestFunction{s}.phi0(), 2) / 6) < 1e-10);
    }
}

TEST_CASE("Fourier transform of phi") {
    for (double s : {1.0, 1.0 / 9}) {
        TestFunction f{s};
        for (double t : {0.0, 0.1, 0.25, 0.5, 0.8, 1.0, 1.3}) {
            const double u = t * s;
            INFO("sigma=" << s << " u=" << u);
            CHECK(std::fabs(fourier_phi(s, u) - f.phi_hat(u)) < 1e-6);
        }
    }
}

TEST_CASE("trace pattern constants") {
    CHECK(predicted_trace_constant({{5, 1, 1}}) == 0);
    CHECK(predicted_trace_constant({{5, 2, 1}}) == -1);
    CHECK(predicted_trace_constant({{5, 1, 2}}) == 1);
    CHECK(predicted_trace_constant({{5, 1, 2}, {7, 2, 1}}) == -1);
    CHECK(predicted_trace_constant({{5, 2, 1}, {7, 2, 1}}) == 1);
    CHECK(predicted_trace_constant({{5, 1, 3}, {7, 2, 1}}) == 0);
    CHECK_THROWS_AS(predicted_trace_constant({{5, 1, 4}}), std::invalid_argument);
    CHECK_THROWS_AS(predicted_trace_constant({{5, 2, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(predicted_trace_constant({{5, 3, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(predicted_trace_constant({{5, 1, 1}, {5, 2, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(predicted_trace_constant({}), std::invalid_argument);
}

TEST_CASE("prime sums and trace formula on a census") {
    auto c = enumerate(Group::Z2, 100000000);
    auto empty = empirical_S1_S2(c, 0.01);
    CHECK(empty.primes_S1 == 0);
    CHECK(empty.S1 == 0);
    CHECK(empty.S2 == 0);
    auto s = empirical_S1_S2(c, 1.0 / 9);
    CHECK(s.primes_S1 == 4);  // 2, 3, 5, 7
    CHECK(s.primes_S2 == 1);  // 2
    CHECK(s.target_S2 == doctest::Approx(-1.0 / 648));
    CHECK(std::isfinite(s.S1));
    CHECK(std::isfinite(s.S2));

    auto odd = trace_formula_check(c, {{5, 1, 1}});
    CHECK(odd.predicted == 0);
    CHECK(std::fabs(odd.normalized) < 0.05);
    auto sq = trace_formula_check(c, {{5, 2, 1}});
    CHECK(sq.predicted == -1);
    CHECK(sq.normalized < 0);
    auto two = trace_formula_check(c, {{7, 1, 2}});
    CHECK(two.predicted == 1);
    CHECK(two.normalized > 0);
    CHECK_THROWS_AS(trace_formula_check(enumerate(Group::Z3, 1000000), {{5, 1, 1}}), UnsupportedBound);
}
