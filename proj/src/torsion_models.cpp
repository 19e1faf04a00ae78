#include "torrank/torsion_models.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <vector>

namespace torrank {

namespace {

// Coefficient tables, monomials a^i b^j. The 2x2 entries are 4 f and 4 g.
constexpr Term f_2[] = {{1, 0, 1LL}};
constexpr Term g_2[] = {{0, 3, 1LL}, {1, 1, 1LL}};
constexpr Term f_3[] = {{1, 1, 6LL}, {4, 0, 27LL}};
constexpr Term g_3[] = {{0, 2, 1LL}, {6, 0, -27LL}};
constexpr Term f_4[] = {{0, 4, -2LL}, {1, 2, 6LL}, {2, 0, -3LL}};
constexpr Term g_4[] = {{0, 6, 1LL}, {1, 4, -4LL}, {2, 2, 3LL}, {3, 0, 2LL}};
constexpr Term f_2_2[] = {{0, 2, -3LL}, {2, 0, -1LL}};
constexpr Term g_2_2[] = {{0, 3, 1LL}, {2, 1, -1LL}};
constexpr Term f_5[] = {{0, 4, -27LL}, {1, 3, -324LL}, {2, 2, -378LL}, {3, 1, 324LL}, {4, 0, -27LL}};
constexpr Term g_5[] = {{0, 6, 54LL}, {1, 5, 972LL}, {2, 4, 4050LL}, {4, 2, 4050LL}, {5, 1, -972LL}, {6, 0, 54LL}};
constexpr Term f_6[] = {{0, 4, -27LL}, {1, 3, -324LL}, {2, 2, -810LL}, {3, 1, -324LL}, {4, 0, -243LL}};
constexpr Term g_6[] = {{0, 6, 54LL}, {1, 5, 972LL}, {2, 4, 5346LL}, {3, 3, 9720LL}, {4, 2, 7290LL}, {5, 1, -2916LL}, {6, 0, -1458LL}};
constexpr Term f_7[] = {{0, 8, -27LL}, {1, 7, -108LL}, {2, 6, 378LL}, {4, 4, -945LL}, {5, 3, 1512LL}, {6, 2, -1134LL}, {7, 1, 324LL}, {8, 0, -27LL}};
constexpr Term g_7[] = {{0, 12, 54LL}, {1, 11, 324LL}, {2, 10, -810LL}, {3, 9, -2484LL}, {4, 8, 9396LL}, {5, 7, -11988LL}, {6, 6, 14742LL}, {7, 5, -26244LL}, {8, 4, 30780LL}, {9, 3, -19116LL}, {10, 2, 6318LL}, {11, 1, -972LL}, {12, 0, 54LL}};
constexpr Term f_8[] = {{0, 8, -27LL}, {1, 7, 432LL}, {2, 6, -2592LL}, {3, 5, 7776LL}, {4, 4, -12960LL}, {5, 3, 12096LL}, {6, 2, -6048LL}, {7, 1, 1728LL}, {8, 0, -432LL}};
constexpr Term g_8[] = {{0, 12, 54LL}, {1, 11, -1296LL}, {2, 10, 12960LL}, {3, 9, -71712LL}, {4, 8, 246240LL}, {5, 7, -554688LL}, {6, 6, 840672LL}, {7, 5, -855360LL}, {8, 4, 555984LL}, {9, 3, -190080LL}, {11, 1, 20736LL}, {12, 0, -3456LL}};
constexpr Term f_9[] = {{0, 12, -27LL}, {2, 10, 324LL}, {3, 9, -756LL}, {4, 8, 486LL}, {5, 7, 972LL}, {6, 6, -3078LL}, {7, 5, 4860LL}, {8, 4, -5103LL}, {9, 3, 3456LL}, {10, 2, -1458LL}, {11, 1, 324LL}, {12, 0, -27LL}};
constexpr Term g_9[] = {{0, 18, 54LL}, {2, 16, -972LL}, {3, 15, 2268LL}, {4, 14, 1458LL}, {5, 13, -16524LL}, {6, 12, 39690LL}, {7, 11, -58320LL}, {8, 10, 73386LL}, {9, 9, -109728LL}, {10, 8, 174960LL}, {11, 7, -228420LL}, {12, 6, 222912LL}, {13, 5, -160380LL}, {14, 4, 84078LL}, {15, 3, -30780LL}, {16, 2, 7290LL}, {17, 1, -972LL}, {18, 0, 54LL}};
constexpr Term f_10[] = {{0, 12, -27LL}, {1, 11, 216LL}, {2, 10, -432LL}, {3, 9, -1080LL}, {4, 8, 6480LL}, {5, 7, -11664LL}, {6, 6, 6912LL}, {7, 5, 7776LL}, {8, 4, -19440LL}, {9, 3, 19440LL}, {10, 2, -11232LL}, {11, 1, 3456LL}, {12, 0, -432LL}};
constexpr Term g_10[] = {{0, 18, 54LL}, {1, 17, -648LL}, {2, 16, 2592LL}, {3, 15, -216LL}, {4, 14, -32400LL}, {5, 13, 112752LL}, {6, 12, -128304LL}, {7, 11, -199584LL}, {8, 10, 981072LL}, {9, 9, -1803600LL}, {10, 8, 2133216LL}, {11, 7, -2037312LL}, {12, 6, 1926288LL}, {13, 5, -1767744LL}, {14, 4, 1296000LL}, {15, 3, -661824LL}, {16, 2, 217728LL}, {17, 1, -41472LL}, {18, 0, 3456LL}};
constexpr Term f_12[] = {{0, 16, -27LL}, {1, 15, 648LL}, {2, 14, -7128LL}, {3, 13, 47952LL}, {4, 12, -221616LL}, {5, 11, 747792LL}, {6, 10, -1907712LL}, {7, 9, 3753216LL}, {8, 8, -5747760LL}, {9, 7, 6855840LL}, {10, 6, -6318000LL}, {11, 5, 4416768LL}, {12, 4, -2269296LL}, {13, 3, 816480LL}, {14, 2, -194400LL}, {15, 1, 31104LL}, {16, 0, -3888LL}};
constexpr Term g_12[] = {{0, 24, 54LL}, {1, 23, -1944LL}, {2, 22, 33048LL}, {3, 21, -353808LL}, {4, 20, 2682720LL}, {5, 19, -15353712LL}, {6, 18, 68988672LL}, {7, 17, -249811776LL}, {8, 16, 742184208LL}, {9, 15, -1831706784LL}, {10, 14, 3786612624LL}, {11, 13, -6590020032LL}, {12, 12, 9676823760LL}, {13, 11, -11984223456LL}, {14, 10, 12478123872LL}, {15, 9, -10854518400LL}, {16, 8, 7806726864LL}, {17, 7, -4566176064LL}, {18, 6, 2114216640LL}, {19, 5, -738377856LL}, {20, 4, 175146624LL}, {21, 3, -19502208LL}, {22, 2, -2519424LL}, {23, 1, 1119744LL}, {24, 0, -93312LL}};
constexpr Term f_2_4[] = {{0, 4, -27LL}, {2, 2, -378LL}, {4, 0, -27LL}};
constexpr Term g_2_4[] = {{0, 6, -54LL}, {2, 4, 1782LL}, {4, 2, 1782LL}, {6, 0, -54LL}};
constexpr Term f_2_6[] = {{0, 8, -62208LL}, {2, 6, -393984LL}, {4, 4, -12960LL}, {6, 2, 1296LL}, {8, 0, -27LL}};
constexpr Term g_2_6[] = {{0, 12, -5971968LL}, {2, 10, 86593536LL}, {4, 8, 43670016LL}, {6, 6, -2363904LL}, {8, 4, 85536LL}, {10, 2, -3888LL}, {12, 0, 54LL}};
constexpr Term f_2_8[] = {{0, 16, -27LL}, {1, 15, -864LL}, {2, 14, -12096LL}, {3, 13, -96768LL}, {4, 12, -476928LL}, {5, 11, -1382400LL}, {6, 10, -1382400LL}, {7, 9, 6414336LL}, {8, 8, 31961088LL}, {9, 7, 51314688LL}, {10, 6, -88473600LL}, {11, 5, -707788800LL}, {12, 4, -1953497088LL}, {13, 3, -3170893824LL}, {14, 2, -3170893824LL}, {15, 1, -1811939328LL}, {16, 0, -452984832LL}};
constexpr Term g_2_8[] = {{0, 24, 54LL}, {1, 23, 2592LL}, {2, 22, 57024LL}, {3, 21, 760320LL}, {4, 20, 6822144LL}, {5, 19, 42964992LL}, {6, 18, 189278208LL}, {7, 17, 535486464LL}, {8, 16, 535818240LL}, {9, 15, -3308912640LL}, {10, 14, -22061776896LL}, {11, 13, -82046877696LL}, {12, 12, -246536994816LL}, {13, 11, -656375021568LL}, {14, 10, -1411953721344LL}, {15, 9, -1694163271680LL}, {16, 8, 2194711511040LL}, {17, 7, 17546820452352LL}, {18, 6, 49618146557952LL}, {19, 5, 90104118902784LL}, {20, 4, 114456583471104LL}, {21, 3, 102048422952960LL}, {22, 2, 61229053771776LL}, {23, 1, 22265110462464LL}, {24, 0, 3710851743744LL}};

const std::array<TorsionGroup, 15> kGroups = {{
    {Group::Trivial, "0", 6, 0, 1, 1, false, false},
    {Group::Z2, "2", 2, 3, 2, 1, false, false},
    {Group::Z3, "3", 3, 4, 3, 1, false, false},
    {Group::Z4, "4", 4, 6, 4, 1, false, false},
    {Group::Z5, "5", 6, 12, 5, 1, false, true},
    {Group::Z6, "6", 6, 12, 6, 1, false, true},
    {Group::Z7, "7", 12, 24, 7, 1, false, true},
    {Group::Z8, "8", 12, 24, 8, 1, false, true},
    {Group::Z9, "9", 18, 36, 9, 1, false, true},
    {Group::Z10, "10", 18, 36, 10, 1, false, true},
    {Group::Z12, "12", 24, 48, 12, 1, false, true},
    {Group::Z2xZ2, "2x2", 3, 6, 2, 2, true, false},
    {Group::Z2xZ4, "2x4", 6, 12, 4, 2, false, true},
    {Group::Z2xZ6, "2x6", 12, 24, 6, 2, false, true},
    {Group::Z2xZ8, "2x8", 24, 48, 8, 2, false, true},
}};

const std::array<Group, 15> kAll = {Group::Trivial, Group::Z2, Group::Z3, Group::Z4,
                                    Group::Z5, Group::Z6, Group::Z7, Group::Z8,
                                    Group::Z9, Group::Z10, Group::Z12, Group::Z2xZ2,
                                    Group::Z2xZ4, Group::Z2xZ6, Group::Z2xZ8};
const std::array<Group, 4> kSmall = {Group::Z2, Group::Z3, Group::Z4, Group::Z2xZ2};
const std::array<Group, 10> kLarge = {Group::Z5, Group::Z6, Group::Z7, Group::Z8,
                                      Group::Z9, Group::Z10, Group::Z12, Group::Z2xZ4,
                                      Group::Z2xZ6, Group::Z2xZ8};

template <std::size_t N, std::size_t M>
ModelPolys make(const Term (&f)[N], const Term (&g)[M], i64 den, int wa, int wb) {
    auto deg = [](std::span<const Term> t) {
        int d = 0;
        for (const auto& x : t) d = std::max(d, x.i + x.j);
        return d;
    };
    return ModelPolys{std::span<const Term>(f), std::span<const Term>(g), den,
                      deg(f), deg(g), wa, wb};
}

const std::map<Group, ModelPolys>& poly_map() {
    static const std::map<Group, ModelPolys> m = {
        {Group::Z2, make(f_2, g_2, 1, 4, 2)},
        {Group::Z3, make(f_3, g_3, 1, 1, 3)},
        {Group::Z4, make(f_4, g_4, 1, 2, 1)},
        {Group::Z2xZ2, make(f_2_2, g_2_2, 4, 2, 2)},
        {Group::Z5, make(f_5, g_5, 1, 0, 0)},
        {Group::Z6, make(f_6, g_6, 1, 0, 0)},
        {Group::Z7, make(f_7, g_7, 1, 0, 0)},
        {Group::Z8, make(f_8, g_8, 1, 0, 0)},
        {Group::Z9, make(f_9, g_9, 1, 0, 0)},
        {Group::Z10, make(f_10, g_10, 1, 0, 0)},
        {Group::Z12, make(f_12, g_12, 1, 0, 0)},
        {Group::Z2xZ4, make(f_2_4, g_2_4, 1, 0, 0)},
        {Group::Z2xZ6, make(f_2_6, g_2_6, 1, 0, 0)},
        {Group::Z2xZ8, make(f_2_8, g_2_8, 1, 0, 0)},
    };
    return m;
}

i128 eval_checked(std::span<const Term> terms, i64 a, i64 b, int deg) {
    std::vector<i128> pa(deg + 1), pb(deg + 1);
    pa[0] = 1;
    pb[0] = 1;
    for (int k = 1; k <= deg; ++k) {
        pa[k] = checked_mul(pa[k - 1], a);
        pb[k] = checked_mul(pb[k - 1], b);
    }
    i128 s = 0;
    for (const auto& t : terms) s = checked_add(s, checked_mul(checked_mul(t.c, pa[t.i]), pb[t.j]));
    return s;
}

i64 eval_mod(std::span<const Term> terms, i64 a, i64 b, int deg, i64 m) {
    std::vector<i64> pa(deg + 1), pb(deg + 1);
    pa[0] = 1 % m;
    pb[0] = 1 % m;
    i64 am = mod(a, m), bm = mod(b, m);
    for (int k = 1; k <= deg; ++k) {
        pa[k] = mulmod(pa[k - 1], am, m);
        pb[k] = mulmod(pb[k - 1], bm, m);
    }
    i64 s = 0;
    for (const auto& t : terms) s = mod(s + mulmod(mulmod(mod(t.c, m), pa[t.i], m), pb[t.j], m), m);
    return s;
}

mpz_class eval_mpz(std::span<const Term> terms, const mpz_class& a, const mpz_class& b, int deg) {
    std::vector<mpz_class> pa(deg + 1), pb(deg + 1);
    pa[0] = 1;
    pb[0] = 1;
    for (int k = 1; k <= deg; ++k) {
        pa[k] = pa[k - 1] * a;
        pb[k] = pb[k - 1] * b;
    }
    mpz_class s = 0, c;
    for (const auto& t : terms) {
        mpz_set_si(c.get_mpz_t(), t.c);
        s += c * pa[t.i] * pb[t.j];
    }
    return s;
}

i64 gcd64(i64 a, i64 b) { return static_cast<i64>(gcd128(a, b)); }

void require_large_coprime(Group G, i64 a, i64 b) {
    if (!torsion_group(G).large) throw std::domain_error("defect: group is not parametrized by coprime pairs");
    if (gcd64(a, b) != 1) throw std::domain_error("defect: gcd(a,b) != 1");
}

constexpr int kDefectPrimes[] = {2, 3, 5, 7};

int valuation(const mpz_class& x, unsigned long l) {
    if (x == 0) return 1 << 20;
    mpz_class t = x;
    return static_cast<int>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), mpz_class(l).get_mpz_t()));
}

i64 defect_of_values(const mpz_class& f, const mpz_class& g) {
    i64 e = 1;
    for (int l : kDefectPrimes) {
        int k = std::min(valuation(f, l) / 4, valuation(g, l) / 6);
        for (int i = 0; i < k; ++i) e *= l;
    }
    return e;
}

}  // namespace

const TorsionGroup& torsion_group(Group g) { return kGroups[static_cast<std::size_t>(g)]; }

Group parse_group(const std::string& label) {
    std::string s = label;
    std::replace(s.begin(), s.end(), 'X', 'x');
    if (s.rfind("Z/", 0) == 0) s = s.substr(2);
    for (const auto& g : kGroups)
        if (s == g.label) return g.id;
    throw std::invalid_argument("unknown torsion group: " + label);
}

std::span<const Group> all_groups() { return kAll; }
std::span<const Group> nontrivial_groups() { return std::span<const Group>(kAll).subspan(1); }
std::span<const Group> small_groups() { return kSmall; }
std::span<const Group> large_groups() { return kLarge; }

const ModelPolys& model_polys(Group g) {
    const auto& m = poly_map();
    auto it = m.find(g);
    if (it == m.end()) throw std::domain_error("no model polynomials for the trivial group");
    return it->second;
}

std::string polynomial_checksum() {
    u64 h = 1469598103934665603ULL;
    auto mix = [&](u64 x) {
        for (int k = 0; k < 8; ++k) {
            h ^= (x >> (8 * k)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    for (Group G : nontrivial_groups()) {
        const auto& mp = model_polys(G);
        mix(static_cast<u64>(G));
        for (auto part : {mp.f, mp.g}) {
            mix(part.size());
            for (const auto& t : part) {
                mix(static_cast<u64>(t.i));
                mix(static_cast<u64>(t.j));
                mix(static_cast<u64>(t.c));
            }
        }
        mix(static_cast<u64>(mp.den));
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FG fg(Group G, i64 a, i64 b) {
    const auto& mp = model_polys(G);
    if (mp.den != 1 && mod(a - b, 2) != 0) throw std::domain_error("2x2 model needs a = b mod 2");
    i128 f = eval_checked(mp.f, a, b, mp.deg_f);
    i128 g = eval_checked(mp.g, a, b, mp.deg_g);
    return {f / mp.den, g / mp.den};
}

std::pair<mpz_class, mpz_class> fg_mpz(Group G, const mpz_class& a, const mpz_class& b) {
    const auto& mp = model_polys(G);
    mpz_class f = eval_mpz(mp.f, a, b, mp.deg_f);
    mpz_class g = eval_mpz(mp.g, a, b, mp.deg_g);
    if (mp.den != 1) {
        if (!mpz_divisible_ui_p(f.get_mpz_t(), mp.den) || !mpz_divisible_ui_p(g.get_mpz_t(), mp.den))
            throw std::domain_error("2x2 model needs a = b mod 2");
        f /= mp.den;
        g /= mp.den;
    }
    return {f, g};
}

std::pair<i64, i64> fg_mod(Group G, i64 a, i64 b, i64 m) {
    const auto& mp = model_polys(G);
    i64 f = eval_mod(mp.f, a, b, mp.deg_f, m);
    i64 g = eval_mod(mp.g, a, b, mp.deg_g, m);
    if (mp.den != 1) {
        i64 inv = invmod(mp.den, m);
        f = mulmod(f, inv, m);
        g = mulmod(g, inv, m);
    }
    return {f, g};
}

i64 defect(Group G, i64 a, i64 b) {
    require_large_coprime(G, a, b);
    auto [f, g] = fg_mpz(G, a, b);
    return defect_of_values(f, g);
}

i64 defect_by_classification(Group G, i64 a, i64 b) {
    require_large_coprime(G, a, b);
    const i64 a2 = mod(a, 2), b2 = mod(b, 2), a3 = mod(a, 3), b3 = mod(b, 3);
    const bool odd_odd = a2 == 1 && b2 == 1;
    const bool odd_even = a2 == 1 && b2 == 0;
    const bool mixed3 = (a3 == 1 && b3 == 2) || (a3 == 2 && b3 == 1);
    i64 e = 1;
    switch (G) {
        case Group::Z5: break;
        case Group::Z6: if (odd_odd) e *= 2; break;
        case Group::Z7: if (mixed3) e *= 3; break;
        case Group::Z8: if (odd_even) e *= 2; break;
        case Group::Z9: if (mixed3) e *= 3; break;
        case Group::Z10: if (odd_even) e *= 2; break;
        case Group::Z12:
            if (odd_even) e *= 2;
            if (a3 != 0 && b3 == 0) e *= 3;
            break;
        case Group::Z2xZ4: if (odd_odd) e *= 2; break;
        default: throw std::domain_error("no defect classification for this group");
    }
    return e;
}

FG phi(Group G, i64 a, i64 b) {
    if (!torsion_group(G).large) return fg(G, a, b);
    require_large_coprime(G, a, b);
    auto [f, g] = fg_mpz(G, a, b);
    i64 e = defect_of_values(f, g);
    mpz_class e4 = 1, e6 = 1;
    for (int k = 0; k < 4; ++k) e4 *= e;
    for (int k = 0; k < 6; ++k) e6 *= e;
    f /= e4;
    g /= e6;
    if (!mpz_fits_slong_p(f.get_mpz_t()) || !mpz_fits_slong_p(g.get_mpz_t())) {
        // fall back to exact int128 assembly via strings
        return {parse_i128(f.get_str()), parse_i128(g.get_str())};
    }
    return {f.get_si(), g.get_si()};
}

int multiplicity(Group G) {
    switch (G) {
        case Group::Trivial: return 1;
        case Group::Z2: return 1;
        case Group::Z3: return 2;
        case Group::Z4: return 2;
        case Group::Z2xZ2: return 6;
        // Measured: modal preimage count of the coprime-pair census.
        case Group::Z5: return 4;
        case Group::Z6: return 2;
        case Group::Z7: return 6;
        case Group::Z8: return 4;
        case Group::Z9: return 6;
        case Group::Z10: return 4;
        case Group::Z12: return 4;
        case Group::Z2xZ4: return 8;
        case Group::Z2xZ6: return 12;
        case Group::Z2xZ8: return 16;
    }
    return 1;
}

bool multiplicity_is_empirical(Group G) { return torsion_group(G).large; }

TateUV tate_curve(Group G, const mpq_class& t) {
    auto nz = [](const mpq_class& x) {
        if (x == 0) throw std::domain_error("tate_curve: denominator vanishes at t");
        return x;
    };
    switch (G) {
        case Group::Z4: return {t, 0};
        case Group::Z5: return {t, t};
        case Group::Z6: return {t + t * t, t};
        case Group::Z7: return {t * t * t - t * t, t * t - t};
        case Group::Z8: {
            mpq_class w = (2 * t - 1) * (t - 1);
            return {w, w / nz(t)};
        }
        case Group::Z9: {
            mpq_class v = t * t * (t - 1);
            return {v * (t * t - t + 1), v};
        }
        case Group::Z10: {
            mpq_class q = nz(-t * t + 3 * t - 1);
            return {t * t * t * (2 * t - 1) * (t - 1) / (q * q), t * (2 * t - 1) * (t - 1) / q};
        }
        case Group::Z12: {
            mpq_class q = nz(t - 1);
            mpq_class w = (3 * t * t - 3 * t + 1) * (t - 2 * t * t);
            return {w * (2 * t - 2 * t * t - 1) / (q * q * q * q), w / (q * q * q)};
        }
        case Group::Z2xZ4: return {t * t - mpq_class(1, 16), 0};
        case Group::Z2xZ6: {
            mpq_class v = (10 - 2 * t) / nz(t * t - 9);
            return {v + v * v, v};
        }
        case Group::Z2xZ8: {
            mpq_class w = (2 * t + 1) * (8 * t * t + 4 * t + 1);
            mpq_class q = nz(8 * t * t - 1);
            return {w / (q * q), w / nz(2 * t * (4 * t + 1) * q)};
        }
        default: throw std::domain_error("tate_curve: no Tate normal form for this group");
    }
}

std::pair<mpq_class, mpq_class> tate_short_weierstrass(const TateUV& uv) {
    mpq_class a1 = 1 - uv.v, a2 = -uv.u, a3 = -uv.u;
    mpq_class b2 = a1 * a1 + 4 * a2;
    mpq_class b4 = a1 * a3;
    mpq_class b6 = a3 * a3;
    mpq_class c4 = b2 * b2 - 24 * b4;
    mpq_class c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
    return {-27 * c4, -54 * c6};
}

mpq_class tate_parameter(Group G, i64 a, i64 b) {
    if (b == 0) throw std::domain_error("tate_parameter: b = 0");
    mpq_class t(a, b);
    t.canonicalize();
    if (G == Group::Z2xZ4) return t / 4;
    if (G == Group::Z2xZ6) return t + 3;
    return t;
}

namespace {
bool is_perfect_power(const mpq_class& x, unsigned long k) {
    if (x <= 0 && k % 2 == 0) return false;
    mpz_class n = abs(x.get_num()), d = x.get_den(), r;
    if (!mpz_root(r.get_mpz_t(), n.get_mpz_t(), k)) return false;
    return mpz_root(r.get_mpz_t(), d.get_mpz_t(), k) != 0;
}
}  // namespace

bool isomorphic_over_q(const mpq_class& A1, const mpq_class& B1, const mpq_class& A2,
                       const mpq_class& B2) {
    if ((A1 == 0) != (A2 == 0) || (B1 == 0) != (B2 == 0)) return false;
    if (A1 == 0 && B1 == 0) return true;
    if (A1 == 0) return is_perfect_power(B2 / B1, 6);
    if (B1 == 0) return is_perfect_power(A2 / A1, 4);
    mpq_class ra = A2 / A1, rb = B2 / B1;
    mpq_class u2 = rb / ra;
    return u2 * u2 == ra && is_perfect_power(u2, 2);
}

}  // namespace torrank
