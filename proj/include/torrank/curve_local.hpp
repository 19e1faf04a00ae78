#pragma once

#include <gmpxx.h>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "torrank/arith.hpp"
#include "torrank/ff.hpp"
#include "torrank/torsion_models.hpp"

namespace torrank {

struct CurveModP {
    i64 A;
    i64 B;
    PrimeModulus p;

    CurveModP(i64 a, i64 b, PrimeModulus pm) : A(mod(a, pm.p)), B(mod(b, pm.p)), p(pm) {}
    bool singular() const;
};

struct GroupShape {
    i64 n1 = 1;
    i64 n2 = 1;
    friend bool operator==(const GroupShape&, const GroupShape&) = default;
};

enum class Reduction { Good, SplitMult, NonsplitMult, Additive };

char reduction_code(Reduction r);  // g s n a
Reduction parse_reduction_code(char c);
bool is_multiplicative(Reduction r);

struct LocalData {
    i64 a_p = 0;
    Reduction reduction = Reduction::Good;
    std::optional<GroupShape> shape;  // good reduction, when requested
};

struct PointCount {
    i64 N;
    i64 a_p;
};

// -sum_x legendre(x^3 + A x + B); also meaningful for singular cubics.
i64 legendre_trace(i64 A, i64 B, PrimeModulus p);

PointCount count_points(const CurveModP& c);
GroupShape group_structure(const CurveModP& c);

// Smooth projective points of a (possibly singular) curve, by enumeration.
i64 count_smooth_points(const CurveModP& c);

LocalData reduction_type(i128 A, i128 B, PrimeModulus p, bool with_shape = false);

// Integral model [a1, a2, a3, a4, a6] with invariants (c4, c6), if one exists.
std::optional<std::array<mpz_class, 5>> model_from_invariants(const mpz_class& c4, const mpz_class& c6);

// Local data of y^2 = x^3 + A x + B at any prime, on a model minimal at p.
LocalData local_reduction(i128 A, i128 B, i64 p);

Rational aut_weight(const CurveModP& c);

// Number of injective homomorphisms G -> Z/n1 x Z/n2.
i64 embedding_count(const GroupShape& s, Group G);
bool torsion_embeds(const GroupShape& s, Group G);
bool torsion_embeds(const CurveModP& c, Group G);

// Full table of traces over (Z/p)^2, a[A*p + B]; singular entries hold +-1 / 0.
class TraceTable {
public:
    explicit TraceTable(PrimeModulus p);
    i64 p() const { return p_; }
    int trace(i64 A, i64 B) const { return t_[static_cast<std::size_t>(A * p_ + B)]; }
    bool singular(i64 A, i64 B) const { return sing_[static_cast<std::size_t>(A * p_ + B)] != 0; }

private:
    i64 p_;
    std::vector<short> t_;
    std::vector<char> sing_;
};

struct CacheError : std::runtime_error {
    CacheError(const std::string& file, std::size_t line, const std::string& what);
    std::string file;
    std::size_t line;
};

// "A B p a_p reduction_code" records, sorted by (p, A, B).
class ApCache {
public:
    static std::string header();
    void insert(i128 A, i128 B, i64 p, const LocalData& ld);
    std::optional<LocalData> find(i128 A, i128 B, i64 p) const;
    void merge(const ApCache& other);  // CacheError on conflicting records
    void load(const std::string& path);
    void save(const std::string& path) const;
    std::size_t size() const { return rec_.size(); }

private:
    using Key = std::tuple<i64, i128, i128>;
    std::map<Key, std::pair<i64, Reduction>> rec_;
};

// Cache directory: TORRANK_CACHE_DIR or ./.torrank-cache
std::string default_cache_dir();

}  // namespace torrank
