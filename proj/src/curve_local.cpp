#include "torrank/curve_local.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace torrank {

namespace {

struct Pt {
    i64 x = 0;
    i64 y = 0;
    bool inf = true;
};

Pt add(const Pt& P, const Pt& Q, i64 A, i64 p) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    i64 lam;
    if (P.x == Q.x) {
        if (mod(P.y + Q.y, p) == 0) return {};
        lam = mulmod(mod(3 * mulmod(P.x, P.x, p) + A, p), invmod(2 * P.y, p), p);
    } else {
        lam = mulmod(mod(Q.y - P.y, p), invmod(Q.x - P.x, p), p);
    }
    i64 x = mod(mulmod(lam, lam, p) - P.x - Q.x, p);
    i64 y = mod(mulmod(lam, P.x - x, p) - P.y, p);
    return {x, y, false};
}

Pt scalar(i64 n, Pt P, i64 A, i64 p) {
    Pt R;
    while (n) {
        if (n & 1) R = add(R, P, A, p);
        P = add(P, P, A, p);
        n >>= 1;
    }
    return R;
}

std::vector<Pt> all_points(const CurveModP& c) {
    const i64 p = c.p.p;
    std::vector<std::vector<i64>> roots(static_cast<std::size_t>(p));
    for (i64 y = 0; y < p; ++y) roots[static_cast<std::size_t>(mulmod(y, y, p))].push_back(y);
    std::vector<Pt> pts{Pt{}};
    for (i64 x = 0; x < p; ++x) {
        i64 r = mod(mulmod(mulmod(x, x, p), x, p) + mulmod(c.A, x, p) + c.B, p);
        for (i64 y : roots[static_cast<std::size_t>(r)]) pts.push_back({x, y, false});
    }
    return pts;
}

i64 gcd64(i64 a, i64 b) { return static_cast<i64>(gcd128(a, b)); }

int moebius(i64 n) {
    int m = 1;
    for (i64 q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            n /= q;
            if (n % q == 0) return 0;
            m = -m;
        }
    }
    if (n > 1) m = -m;
    return m;
}

i64 torsion_size(const GroupShape& s, i64 m) { return gcd64(m, s.n1) * gcd64(m, s.n2); }

i64 exact_order_count(const GroupShape& s, i64 n) {
    i64 total = 0;
    for (i64 d = 1; d <= n; ++d)
        if (n % d == 0) total += moebius(n / d) * torsion_size(s, d);
    return total;
}

}  // namespace

bool CurveModP::singular() const {
    const i64 q = p.p;
    return mod(4 * mulmod(mulmod(A, A, q), A, q) + 27 * mulmod(B, B, q), q) == 0;
}

char reduction_code(Reduction r) {
    switch (r) {
        case Reduction::Good: return 'g';
        case Reduction::SplitMult: return 's';
        case Reduction::NonsplitMult: return 'n';
        case Reduction::Additive: return 'a';
    }
    return '?';
}

Reduction parse_reduction_code(char c) {
    switch (c) {
        case 'g': return Reduction::Good;
        case 's': return Reduction::SplitMult;
        case 'n': return Reduction::NonsplitMult;
        case 'a': return Reduction::Additive;
        default: throw std::invalid_argument(std::string("bad reduction code: ") + c);
    }
}

bool is_multiplicative(Reduction r) {
    return r == Reduction::SplitMult || r == Reduction::NonsplitMult;
}

i64 legendre_trace(i64 A, i64 B, PrimeModulus pm) {
    const i64 p = pm.p;
    i64 s = 0;
    for (i64 x = 0; x < p; ++x)
        s += legendre(mulmod(mulmod(x, x, p), x, p) + mulmod(A, x, p) + B, pm);
    return -s;
}

PointCount count_points(const CurveModP& c) {
    if (c.singular()) throw std::domain_error("count_points: singular curve");
    i64 a = legendre_trace(c.A, c.B, c.p);
    return {c.p.p + 1 - a, a};
}

GroupShape group_structure(const CurveModP& c) {
    if (c.singular()) throw std::domain_error("group_structure: singular curve");
    const i64 p = c.p.p;
    auto pts = all_points(c);
    const i64 N = static_cast<i64>(pts.size());
    i64 n2 = 1;
    for (i64 m = 2; m * m <= N; ++m) {
        if (N % (m * m) != 0 || (p - 1) % m != 0) continue;
        i64 k = 0;
        for (const auto& P : pts)
            if (scalar(m, P, c.A, p).inf) ++k;
        if (k == m * m) n2 = m;
    }
    return {N / n2, n2};
}

i64 count_smooth_points(const CurveModP& c) {
    const i64 p = c.p.p;
    auto pts = all_points(c);
    i64 n = 0;
    for (const auto& P : pts) {
        if (P.inf) {
            ++n;
            continue;
        }
        // singular iff y = 0 and 3x^2 + A = 0
        bool sing = P.y == 0 && mod(3 * mulmod(P.x, P.x, p) + c.A, p) == 0;
        if (!sing) ++n;
    }
    return n;
}

LocalData reduction_type(i128 A128, i128 B128, PrimeModulus pm, bool with_shape) {
    const i64 p = pm.p;
    CurveModP c(mod(A128, p), mod(B128, p), pm);
    LocalData ld;
    if (!c.singular()) {
        ld.reduction = Reduction::Good;
        ld.a_p = legendre_trace(c.A, c.B, pm);
        if (with_shape) ld.shape = group_structure(c);
        return ld;
    }
    if (c.A == 0) {
        ld.reduction = Reduction::Additive;
        ld.a_p = 0;
        return ld;
    }
    // x^3 + Ax + B = (x - x0)^2 (x - x1), x0 = -3B/(2A), x1 = -2 x0
    i64 x0 = mulmod(mod(-3 * c.B, p), invmod(2 * c.A, p), p);
    i64 x1 = mod(-2 * x0, p);
    bool split = legendre(x0 - x1, pm) == 1;
    ld.reduction = split ? Reduction::SplitMult : Reduction::NonsplitMult;
    ld.a_p = split ? 1 : -1;
    return ld;
}

Rational aut_weight(const CurveModP& c) {
    if (c.singular()) throw std::domain_error("aut_weight: singular curve");
    const i64 p = c.p.p;
    if (c.B == 0 && p % 4 == 1) return Rational(1, 4);
    if (c.A == 0 && p % 3 == 1) return Rational(1, 6);
    return Rational(1, 2);
}

i64 embedding_count(const GroupShape& s, Group G) {
    const auto& tg = torsion_group(G);
    if (G == Group::Trivial) return 1;
    if (tg.n2 == 1) return exact_order_count(s, tg.n1);
    i64 t2 = torsion_size(s, 2);
    if (t2 < 4) return 0;
    return exact_order_count(s, tg.n1) * (t2 - 2);
}

bool torsion_embeds(const GroupShape& s, Group G) { return embedding_count(s, G) > 0; }

bool torsion_embeds(const CurveModP& c, Group G) {
    return torsion_embeds(group_structure(c), G);
}

TraceTable::TraceTable(PrimeModulus pm) : p_(pm.p) {
    const i64 p = p_;
    const auto n = static_cast<std::size_t>(p * p);
    t_.assign(n, 0);
    sing_.assign(n, 0);
    std::vector<int> chi(static_cast<std::size_t>(p), -1);
    chi[0] = 0;
    for (i64 y = 1; y < p; ++y) chi[static_cast<std::size_t>(mulmod(y, y, p))] = 1;
    std::vector<i64> cubes(static_cast<std::size_t>(p));
    for (i64 x = 0; x < p; ++x) cubes[static_cast<std::size_t>(x)] = mulmod(mulmod(x, x, p), x, p);
    std::vector<int> hist(static_cast<std::size_t>(p));
    for (i64 A = 0; A < p; ++A) {
        std::fill(hist.begin(), hist.end(), 0);
        for (i64 x = 0; x < p; ++x)
            ++hist[static_cast<std::size_t>((cubes[static_cast<std::size_t>(x)] + A * x) % p)];
        for (i64 B = 0; B < p; ++B) {
            int s = 0;
            for (i64 v = 0; v < p; ++v) {
                int h = hist[static_cast<std::size_t>(v)];
                if (h) {
                    i64 w = v + B;
                    if (w >= p) w -= p;
                    s += h * chi[static_cast<std::size_t>(w)];
                }
            }
            const auto idx = static_cast<std::size_t>(A * p + B);
            t_[idx] = static_cast<short>(-s);
            sing_[idx] = CurveModP(A, B, pm).singular() ? 1 : 0;
        }
    }
}

CacheError::CacheError(const std::string& f, std::size_t l, const std::string& what)
    : std::runtime_error(f + ":" + std::to_string(l) + ": " + what), file(f), line(l) {}

std::string ApCache::header() {
    return "# torrank a_p cache v1 polys=" + polynomial_checksum();
}

void ApCache::insert(i128 A, i128 B, i64 p, const LocalData& ld) {
    rec_[Key{p, A, B}] = {ld.a_p, ld.reduction};
}

std::optional<LocalData> ApCache::find(i128 A, i128 B, i64 p) const {
    auto it = rec_.find(Key{p, A, B});
    if (it == rec_.end()) return std::nullopt;
    LocalData ld;
    ld.a_p = it->second.first;
    ld.reduction = it->second.second;
    return ld;
}

void ApCache::merge(const ApCache& other) {
    for (const auto& [k, v] : other.rec_) {
        auto it = rec_.find(k);
        if (it != rec_.end() && it->second != v)
            throw CacheError("<merge>", 0, "conflicting records for A=" + to_string(std::get<1>(k)) +
                                               " B=" + to_string(std::get<2>(k)) +
                                               " p=" + std::to_string(std::get<0>(k)));
        rec_[k] = v;
    }
}

void ApCache::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CacheError(path, 0, "cannot open");
    std::string line;
    std::size_t ln = 0;
    if (!std::getline(in, line)) throw CacheError(path, 1, "missing header");
    ++ln;
    if (line != header()) throw CacheError(path, 1, "header mismatch (stale or foreign cache)");
    std::optional<Key> prev;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string sA, sB, sp, sa, code, extra;
        if (!(ss >> sA >> sB >> sp >> sa >> code) || (ss >> extra) || code.size() != 1)
            throw CacheError(path, ln, "malformed record");
        try {
            i128 A = parse_i128(sA), B = parse_i128(sB);
            i64 p = static_cast<i64>(parse_i128(sp));
            i64 a = static_cast<i64>(parse_i128(sa));
            Reduction r = parse_reduction_code(code[0]);
            bool ok = true;
            switch (r) {
                case Reduction::Good: ok = static_cast<double>(a * a) < 4.0 * static_cast<double>(p); break;
                case Reduction::SplitMult: ok = a == 1; break;
                case Reduction::NonsplitMult: ok = a == -1; break;
                case Reduction::Additive: ok = a == 0; break;
            }
            if (!ok) throw CacheError(path, ln, "a_p inconsistent with reduction code");
            Key k{p, A, B};
            if (prev && !(*prev < k)) throw CacheError(path, ln, "records not sorted by (p, A, B)");
            prev = k;
            rec_[k] = {a, r};
        } catch (const CacheError&) {
            throw;
        } catch (const std::exception& e) {
            throw CacheError(path, ln, e.what());
        }
    }
}

void ApCache::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw CacheError(path, 0, "cannot write");
    out << header() << '\n';
    for (const auto& [k, v] : rec_) {
        out << to_string(std::get<1>(k)) << ' ' << to_string(std::get<2>(k)) << ' ' << std::get<0>(k)
            << ' ' << v.first << ' ' << reduction_code(v.second) << '\n';
    }
}

std::string default_cache_dir() {
    if (const char* env = std::getenv("TORRANK_CACHE_DIR"); env && *env) return env;
    return ".torrank-cache";
}

std::optional<std::array<mpz_class, 5>> model_from_invariants(const mpz_class& c4, const mpz_class& c6) {
    const mpz_class disc = c4 * c4 * c4 - c6 * c6;
    if (disc == 0 || disc % 1728 != 0) return std::nullopt;
    // b2 = -c6 mod 12, taken in [-5, 6]
    mpz_class b2 = -c6 % 12;
    if (b2 < -5) b2 += 12;
    if (b2 > 6) b2 -= 12;
    const mpz_class n4 = b2 * b2 - c4;
    if (n4 % 24 != 0) return std::nullopt;
    const mpz_class b4 = n4 / 24;
    const mpz_class n6 = -b2 * b2 * b2 + 36 * b2 * b4 - c6;
    if (n6 % 216 != 0) return std::nullopt;
    const mpz_class b6 = n6 / 216;
    const mpz_class a1 = (b2 % 2 != 0) ? 1 : 0, a3 = (b6 % 2 != 0) ? 1 : 0;
    const mpz_class r2 = b2 - a1, r4 = b4 - a1 * a3, r6 = b6 - a3;
    if (r2 % 4 != 0 || r4 % 2 != 0 || r6 % 4 != 0) return std::nullopt;
    std::array<mpz_class, 5> a{a1, r2 / 4, a3, r4 / 2, r6 / 4};
    // the b-invariants must reproduce c4 and c6 exactly
    const mpz_class B2 = a[0] * a[0] + 4 * a[1], B4 = a[0] * a[2] + 2 * a[3], B6 = a[2] * a[2] + 4 * a[4];
    if (B2 * B2 - 24 * B4 != c4 || -B2 * B2 * B2 + 36 * B2 * B4 - 216 * B6 != c6) return std::nullopt;
    return a;
}

LocalData local_reduction(i128 A, i128 B, i64 p) {
    if (!is_prime(p)) throw std::invalid_argument("local_reduction: p must be prime");
    if (p >= 5) {
        const i128 p4 = static_cast<i128>(p) * p * p * p, p6 = p4 * p * p;
        while ((A != 0 || B != 0) && A % p4 == 0 && B % p6 == 0) {
            A /= p4;
            B /= p6;
        }
        return reduction_type(A, B, PrimeModulus(p));
    }
    mpz_class c4 = -48 * mpz_class(to_string(A)), c6 = -864 * mpz_class(to_string(B));
    if (c4 * c4 * c4 == c6 * c6) throw std::domain_error("local_reduction: singular curve");
    const mpz_class q4 = p * p * p * p, q6 = q4 * p * p;
    auto model = model_from_invariants(c4, c6);
    while (c4 % q4 == 0 && c6 % q6 == 0) {
        auto m = model_from_invariants(c4 / q4, c6 / q6);
        if (!m) break;
        c4 /= q4;
        c6 /= q6;
        model = m;
    }
    if (!model) throw std::logic_error("local_reduction: no integral model");
    // a_p = p + 1 - #E(F_p) holds on a minimal model at bad primes too, counting the singular point
    i64 a[5];
    for (int i = 0; i < 5; ++i) {
        mpz_class r = (*model)[static_cast<std::size_t>(i)] % p;
        if (r < 0) r += p;
        a[i] = r.get_si();
    }
    i64 n = 1;
    for (i64 x = 0; x < p; ++x)
        for (i64 y = 0; y < p; ++y)
            if ((y * y + a[0] * x * y + a[2] * y - x * x * x - a[1] * x * x - a[3] * x - a[4]) % p == 0) ++n;
    LocalData ld;
    ld.a_p = p + 1 - n;
    const mpz_class disc = (c4 * c4 * c4 - c6 * c6) / 1728;
    if (disc % p != 0)
        ld.reduction = Reduction::Good;
    else if (c4 % p != 0)
        ld.reduction = ld.a_p == 1 ? Reduction::SplitMult : Reduction::NonsplitMult;
    else
        ld.reduction = Reduction::Additive;
    return ld;
}

}  // namespace torrank
