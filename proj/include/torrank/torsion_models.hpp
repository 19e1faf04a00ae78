#pragma once

#include <gmpxx.h>

#include <optional>
#include <span>
#include <string>
#include <utility>

#include "torrank/arith.hpp"

namespace torrank {

enum class Group { Trivial, Z2, Z3, Z4, Z5, Z6, Z7, Z8, Z9, Z10, Z12, Z2xZ2, Z2xZ4, Z2xZ6, Z2xZ8 };

struct TorsionGroup {
    Group id;
    const char* label;
    int d;       // counting exponent: |E_G(X)| ~ X^{1/d}
    int e;       // exceptional-preimage exponent
    int n1;      // G = Z/n2 x Z/n1 with n2 | n1
    int n2;
    bool is2x2;
    bool large;  // parametrized by coprime pairs (Tate normal form)

    int order() const { return n1 * n2; }
};

const TorsionGroup& torsion_group(Group g);
Group parse_group(const std::string& label);  // "0", "2", ..., "12", "2x2", ...
std::span<const Group> all_groups();
std::span<const Group> nontrivial_groups();
std::span<const Group> small_groups();  // Z/2, Z/3, Z/4, 2x2
std::span<const Group> large_groups();  // the ten groups parametrized by coprime pairs

struct Term {
    int i;  // power of a
    int j;  // power of b
    i64 c;
};

struct ModelPolys {
    std::span<const Term> f;
    std::span<const Term> g;
    i64 den;  // f, g are (stored polynomial)/den; 4 for 2x2, else 1
    int deg_f;
    int deg_g;
    // Weighted homogeneity f(l^wa a, l^wb b) = l^4 f, g -> l^6 g (small groups).
    int wa;
    int wb;
};

const ModelPolys& model_polys(Group g);

// FNV-1a over every stored coefficient; cache files carry it.
std::string polynomial_checksum();

struct FG {
    i128 f;
    i128 g;
};

// Exact evaluation. Throws std::overflow_error past int128, std::domain_error for the
// trivial group or a 2x2 pair with a != b mod 2.
FG fg(Group G, i64 a, i64 b);
std::pair<mpz_class, mpz_class> fg_mpz(Group G, const mpz_class& a, const mpz_class& b);

// Residues mod m (m odd or den == 1).
std::pair<i64, i64> fg_mod(Group G, i64 a, i64 b, i64 m);

// Largest e with e^4 | f, e^6 | g, over primes 2, 3, 5, 7. Large groups, gcd(a,b) = 1.
i64 defect(Group G, i64 a, i64 b);
// The congruence classification (not defined for 2x6, 2x8).
i64 defect_by_classification(Group G, i64 a, i64 b);

// (f/e^4, g/e^6) for large groups, (f, g) otherwise.
FG phi(Group G, i64 a, i64 b);

// r(G): exact for the small groups; empirical values measured on censuses otherwise.
int multiplicity(Group G);
bool multiplicity_is_empirical(Group G);

struct TateUV {
    mpq_class u;
    mpq_class v;
};
TateUV tate_curve(Group G, const mpq_class& t);

// y^2 + (1-v)xy - uy = x^3 - ux^2  ->  y^2 = x^3 + A x + B over Q.
std::pair<mpq_class, mpq_class> tate_short_weierstrass(const TateUV& uv);

// Parameter t for the Tate table matching the stored (f, g) at (a, b); the 2x4 and
// 2x6 tables are stored after a substitution.
mpq_class tate_parameter(Group G, i64 a, i64 b);

bool isomorphic_over_q(const mpq_class& A1, const mpq_class& B1, const mpq_class& A2,
                       const mpq_class& B2);

}  // namespace torrank
