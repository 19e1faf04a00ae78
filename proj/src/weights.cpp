#include "torrank/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace torrank {

u64 WeightTable::total() const {
    u64 s = 0;
    for (u64 x : w) s += x;
    return s;
}

WeightTable build_weight_table(Group G, PrimeModulus pm, int workers) {
    const i64 p = pm.p;
    WeightTable t{G, p, std::vector<u64>(static_cast<std::size_t>(p * p), 0)};
    if (G == Group::Trivial) {
        std::fill(t.w.begin(), t.w.end(), 1);
        return t;
    }
    workers = std::clamp(workers, 1, static_cast<int>(std::min<i64>(p, 64)));
    std::vector<std::vector<u64>> parts(static_cast<std::size_t>(workers));
    auto stripe = [&](int k) {
        auto& acc = parts[static_cast<std::size_t>(k)];
        acc.assign(static_cast<std::size_t>(p * p), 0);
        for (i64 a = k; a < p; a += workers)
            for (i64 b = 0; b < p; ++b) {
                auto [f, g] = fg_mod(G, a, b, p);
                ++acc[static_cast<std::size_t>(f * p + g)];
            }
    };
    if (workers == 1) {
        stripe(0);
    } else {
        std::vector<std::thread> th;
        for (int k = 0; k < workers; ++k) th.emplace_back(stripe, k);
        for (auto& x : th) x.join();
    }
    for (const auto& acc : parts)
        for (std::size_t i = 0; i < acc.size(); ++i) t.w[i] += acc[i];
    return t;
}

i64 singular_weight_sum(const WeightTable& t) {
    PrimeModulus pm(t.p);
    i64 s = 0;
    for (i64 A = 0; A < t.p; ++A)
        for (i64 B = 0; B < t.p; ++B)
            if (CurveModP(A, B, pm).singular()) s += static_cast<i64>(t.at(A, B));
    return s;
}

i64 singular_weight_sum(Group G, PrimeModulus p) { return singular_weight_sum(build_weight_table(G, p)); }

ReductionWeights reduction_weights(const WeightTable& t) {
    PrimeModulus pm(t.p);
    ReductionWeights r;
    for (i64 A = 0; A < t.p; ++A)
        for (i64 B = 0; B < t.p; ++B) {
            const i64 w = static_cast<i64>(t.at(A, B));
            if (!CurveModP(A, B, pm).singular()) {
                r.good += w;
                continue;
            }
            switch (reduction_type(A, B, pm).reduction) {
                case Reduction::SplitMult: r.split += w; break;
                case Reduction::NonsplitMult: r.nonsplit += w; break;
                default: r.additive += w; break;
            }
        }
    return r;
}

std::optional<i64> expected_singular_sum(Group G, i64 p) {
    if (p < 5 || !is_prime(p)) return std::nullopt;
    PrimeModulus pm(p);
    auto lin = [p](i64 k) { return k * p - (k - 1); };
    const i64 m5 = p % 5, m8 = p % 8;
    const bool pm1_5 = m5 == 1 || m5 == 4;
    switch (G) {
        case Group::Trivial: return std::nullopt;
        case Group::Z2:
        case Group::Z3: return lin(2);
        case Group::Z4:
        case Group::Z2xZ2: return lin(3);
        case Group::Z5:
            if (p == 5) return std::nullopt;
            return pm1_5 ? lin(4) : lin(2);
        case Group::Z6: return lin(4);
        case Group::Z7:
            if (p == 7) return std::nullopt;
            return is_cube(qe_reduce({4 * 637, 4 * 147}, pm), pm) ? lin(6) : lin(3);
        case Group::Z8: return (m8 == 1 || m8 == 7) ? lin(6) : lin(4);
        case Group::Z9: {
            // gamma_9 has norm 12^3, so a cube in one factor of the split ring is a cube in both
            const bool cube = is_cube(qe_reduce({-36, 12}, pm), pm);
            if (p % 3 == 1) return cube ? lin(8) : lin(5);
            return cube ? lin(6) : lin(3);
        }
        case Group::Z10:
            if (p == 5) return std::nullopt;
            return pm1_5 ? lin(8) : lin(4);
        case Group::Z12: return p % 12 == 1 ? lin(10) : lin(6);
        case Group::Z2xZ4: return lin(4);
        case Group::Z2xZ6: return lin(6);
        case Group::Z2xZ8:
            if (p < 11) return std::nullopt;
            switch (m8) {
                case 1: return lin(10);
                case 7: return lin(8);
                case 5: return lin(6);
                default: return lin(4);
            }
    }
    return std::nullopt;
}

i64 split_bias_sum(PrimeModulus pm) {
    const i64 p = pm.p;
    auto t = build_weight_table(Group::Z3, pm);
    std::vector<char> square(static_cast<std::size_t>(p), 0);
    for (i64 x = 1; x < p; ++x) square[static_cast<std::size_t>(mulmod(x, x, p))] = 1;
    i64 s = 0;
    for (i64 al = 1; al < p; ++al) {
        if (!square[static_cast<std::size_t>(al)]) continue;
        const i64 al2 = mulmod(al, al, p);
        s += static_cast<i64>(t.at(mod(-3 * al2, p), mulmod(2 * al2 % p, al, p)));
    }
    return s;
}

i64 expected_split_bias(i64 p) {
    switch (p % 12) {
        case 1: return 2 * (p - 1);
        case 5:
        case 11: return p - 1;
        case 7: return 0;
    }
    throw std::invalid_argument("expected_split_bias: p must be a prime >= 5");
}

i64 ClassNumberRow::total() const {
    i64 s = 0;
    for (i64 h : H) s += h;
    return s;
}

namespace {
i64 floor_2sqrt(i64 p) {
    i64 r = static_cast<i64>(std::sqrt(4.0 * static_cast<double>(p)));
    while (r * r > 4 * p) --r;
    while ((r + 1) * (r + 1) <= 4 * p) ++r;
    return r;
}
}  // namespace

ClassNumberRow class_numbers(const WeightTable& t, const TraceTable& traces) {
    if (traces.p() != t.p) throw std::invalid_argument("class_numbers: prime mismatch");
    const i64 p = t.p;
    ClassNumberRow row{t.G, p, floor_2sqrt(p), {}};
    row.H.assign(static_cast<std::size_t>(2 * row.amax + 1), 0);
    for (i64 A = 0; A < p; ++A)
        for (i64 B = 0; B < p; ++B) {
            if (traces.singular(A, B)) continue;
            const i64 a = traces.trace(A, B);
            row.H[static_cast<std::size_t>(a + row.amax)] += static_cast<i64>(t.at(A, B));
        }
    return row;
}

ClassNumberRow class_numbers(Group G, PrimeModulus p) {
    return class_numbers(build_weight_table(G, p), TraceTable(p));
}

i128 moment_sum(const ClassNumberRow& row, int R) {
    if (R < 0) throw std::invalid_argument("moment_sum: R < 0");
    i128 s = 0;
    for (i64 a = -row.amax; a <= row.amax; ++a) {
        const i64 h = row.at(a);
        if (h) s = checked_add(s, checked_mul(checked_pow(a, static_cast<unsigned>(R)), h));
    }
    return s;
}

i128 moment_sum(Group G, PrimeModulus p, int R) { return moment_sum(class_numbers(G, p), R); }

i128 chebyshev_U(int k, i128 t, i128 q) {
    if (k < 0) throw std::invalid_argument("chebyshev_U: negative index");
    i128 u0 = 1, u1 = t;
    if (k == 0) return u0;
    for (int j = 1; j < k; ++j) {
        i128 u2 = checked_add(checked_mul(t, u1), -checked_mul(q, u0));
        u0 = u1;
        u1 = u2;
    }
    return u1;
}

namespace {
i128 binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    i128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
i128 cheb_a(int m, int j) { return binom(2 * m, j) - binom(2 * m, j - 1); }
}  // namespace

i128 chebyshev_coeff(int R, int j) {
    if (R < 0 || j < 0 || j > R / 2) throw std::out_of_range("chebyshev_coeff: j outside 0..R/2");
    if (R % 2 == 0) return cheb_a(R / 2, j);
    return cheb_a((R - 1) / 2, j) + cheb_a((R - 1) / 2, j - 1);
}

Rational expectation(const TraceTable& traces, int R, const GroupShape& A) {
    if (R < 0) throw std::invalid_argument("expectation: R < 0");
    const i64 p = traces.p();
    if (std::gcd(p, A.n1 * A.n2) != 1) throw std::invalid_argument("expectation: p divides |A|");
    PrimeModulus pm(p);
    i128 s = 0;
    for (i64 a = 0; a < p; ++a)
        for (i64 b = 0; b < p; ++b) {
            if (traces.singular(a, b)) continue;
            const GroupShape E = group_structure(CurveModP(a, b, pm));
            // A = Z/n1 x Z/n2 embeds iff n1 | E.n1 and n2 | E.n2
            if (E.n1 % A.n1 || E.n2 % A.n2) continue;
            s = checked_add(s, checked_pow(traces.trace(a, b), static_cast<unsigned>(R)));
        }
    return Rational(s, static_cast<i128>(p) * (p - 1));
}

Rational expectation(PrimeModulus p, int R, const GroupShape& A) { return expectation(TraceTable(p), R, A); }

Rational hurwitz_H(i64 D) {
    if (D >= 0 || (mod(D, 4) != 0 && mod(D, 4) != 1))
        throw std::invalid_argument("hurwitz_H: invalid discriminant " + std::to_string(D));
    const i64 N = -D;
    Rational h(0);
    // reduced: |b| <= a <= c, b >= 0 when |b| = a or a = c
    for (i64 a = 1; 3 * a * a <= N; ++a)
        for (i64 b = -a + 1; b <= a; ++b) {
            const i64 num = b * b + N;
            if (num % (4 * a)) continue;
            const i64 c = num / (4 * a);
            if (c < a) continue;
            if (c == a && b < 0) continue;
            if (b == 0 && a == c)
                h += Rational(1, 2);
            else if (b == a && a == c)
                h += Rational(1, 3);
            else
                h += Rational(1);
        }
    return h;
}

Rational schoof_N2(i64 a, i64 p) {
    if (mod(a - (p + 1), 2) != 0) return Rational(0);
    return hurwitz_H(a * a - 4 * p);
}

Rational schoof_N2x2(i64 a, i64 p) {
    if (mod(a - (p + 1), 4) != 0) return Rational(0);
    const i64 D = a * a - 4 * p;
    if (D % 4) return Rational(0);
    return hurwitz_H(D / 4);
}

std::string weight_table_tsv(const WeightTable& t, bool nonzero_only) {
    std::ostringstream out;
    const char* g = torsion_group(t.G).label;
    for (i64 A = 0; A < t.p; ++A)
        for (i64 B = 0; B < t.p; ++B) {
            const u64 w = t.at(A, B);
            if (nonzero_only && w == 0) continue;
            out << g << '\t' << t.p << '\t' << A << '\t' << B << '\t' << w << '\n';
        }
    return out.str();
}

std::string class_number_tsv(const ClassNumberRow& row) {
    std::ostringstream out;
    const char* g = torsion_group(row.G).label;
    for (i64 a = -row.amax; a <= row.amax; ++a)
        out << g << '\t' << row.p << '\t' << a << '\t' << row.at(a) << '\n';
    return out.str();
}

}  // namespace torrank
