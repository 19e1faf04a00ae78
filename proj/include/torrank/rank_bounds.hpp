#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "torrank/census.hpp"
#include "torrank/curve_local.hpp"
#include "torrank/torsion_models.hpp"

namespace torrank {

// phi(x) = sin^2(pi sigma x) / (2 pi x)^2, phi_hat(u) = (sigma - |u|)/4 on |u| <= sigma
struct TestFunction {
    double sigma;

    double phi(double x) const;
    double phi_hat(double u) const;
    double phi0() const { return sigma * sigma / 4; }
    double phi_hat0() const { return sigma / 4; }
};

struct UnsupportedBound : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct VacuousBound : std::domain_error {
    using std::domain_error::domain_error;
};

// Each error term X^{alpha + beta sigma} of the prime sums must have negative exponent.
struct SigmaConstraint {
    std::string term;
    mpq_class bound;  // sigma < bound
};

struct SigmaDerivation {
    Group G;
    std::vector<SigmaConstraint> constraints;
    mpq_class sigma;  // min over the constraints
};

// Average-rank sigma: Z/3, Z/4 and the large groups.
SigmaDerivation sigma_derivation(Group G);
mpq_class sigma_for(Group G);

// n-level sigma for Z/2 and 2x2, and sigma_{2n} = sigma_n(G, 2n).
SigmaDerivation sigma_n_derivation(Group G, int n);
mpq_class sigma_n(Group G, int n);
mpq_class sigma_2n(Group G, int n);

// 1/2 + 1/sigma; for Z/2 and 2x2 this is moment_bound(G, 1).
mpq_class average_rank_bound(Group G);

mpq_class moment_bound(Group G, int n);

struct TailBound {
    mpq_class bound;
    int n;
    mpq_class C;
};

// Minimum over 1 <= n <= 64 with C = a sigma_{2n} - 1 > 0.
TailBound tail_bound(Group G, const mpq_class& a);

// Normalized coefficient at p^e, e in {1, 2}.
double hat_a(const LocalData& ld, i64 p, int e);

struct PrimeSums {
    double S1 = 0;
    double S2 = 0;
    double target_S2 = 0;  // -phi(0)/2; S1 tends to 0
    int primes_S1 = 0;
    int primes_S2 = 0;
};

PrimeSums empirical_S1_S2(const CensusResult& c, double sigma);

struct TraceFactor {
    i64 p;
    int e;
    int r;
};

int predicted_trace_constant(const std::vector<TraceFactor>& pattern);

struct TraceCheck {
    double lhs;         // sum over the census of the product
    double normalized;  // lhs / (|E_G(X)| / zeta(12/d))
    int predicted;      // 0, -1 or 1
};

TraceCheck trace_formula_check(const CensusResult& c, const std::vector<TraceFactor>& pattern);

// Quadrature of int |u| phi_hat(u)^2 du; equals sigma^4/96.
double abs_u_phi_hat_sq(double sigma);

// int phi(x) e^{-2 pi i u x} dx by quadrature on [-L, L] plus the asymptotic tail.
double fourier_phi(double sigma, double u);

}  // namespace torrank
