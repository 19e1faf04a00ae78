#include "torrank/census.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "torrank/weights.hpp"

namespace torrank {

namespace {

mpz_class to_mpz(i128 x) { return mpz_class(to_string(x)); }

i128 from_mpz(const mpz_class& x) { return parse_i128(x.get_str()); }

bool fits_i128(const mpz_class& x) { return mpz_sizeinbase(x.get_mpz_t(), 2) < 126; }

// Exact values of (f, g) at an integer pair; nullopt-free: mpz on overflow.
struct Values {
    bool small;  // i128 valid
    i128 f, g;
    mpz_class F, Gz;
};

Values eval_fg(Group G, i64 a, i64 b) {
    Values v{};
    try {
        FG x = fg(G, a, b);
        v.small = true;
        v.f = x.f;
        v.g = x.g;
    } catch (const std::overflow_error&) {
        auto [F, Gz] = fg_mpz(G, a, b);
        v.small = false;
        v.F = F;
        v.Gz = Gz;
    }
    return v;
}

bool height_at_most_mpz(const mpz_class& A, const mpz_class& B, const mpz_class& X) {
    mpz_class a3 = abs(A);
    a3 = a3 * a3 * a3;
    return a3 <= X && B * B <= X;
}

}  // namespace

bool height_at_most(i128 A, i128 B, i128 X) {
    const i128 a = abs128(A), b = abs128(B);
    if (a > static_cast<i128>(1000000000000LL) || b > static_cast<i128>(1000000000000000000LL))
        return height_at_most_mpz(to_mpz(A), to_mpz(B), to_mpz(X));
    return a * a * a <= X && b * b <= X;
}

bool is_singular(i128 A, i128 B) {
    mpz_class a = to_mpz(A), b = to_mpz(B);
    return 4 * a * a * a + 27 * b * b == 0;
}

bool is_minimal(i128 A, i128 B) {
    i128 g = gcd128(abs128(A), abs128(B));
    if (A == 0 && B == 0) return false;
    // any q with q^4 | A, q^6 | B has q^4 <= g (or q^6 <= |B| when A = 0)
    for (i128 q = 2;; ++q) {
        const i128 q2 = q * q, q4 = q2 * q2;
        if (A != 0 ? q4 > g : q4 * q2 > abs128(B)) break;
        if (A % q4 == 0 && B % (q4 * q2) == 0) return false;
    }
    return true;
}

double count_exponent(Group G) {
    if (G == Group::Trivial) return 5.0 / 6.0;
    return 1.0 / torsion_group(G).d;
}

i128 parse_height(const std::string& s) {
    std::string mant = s;
    long ex = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = s.substr(0, epos);
        std::size_t used = 0;
        ex = std::stol(s.substr(epos + 1), &used);
        if (used != s.size() - epos - 1) throw std::invalid_argument("bad height: " + s);
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        ex -= static_cast<long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    if (mant.empty() || mant.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad height: " + s);
    mpz_class v(mant);
    mpz_class ten = 10;
    if (ex >= 0) {
        mpz_class t;
        mpz_pow_ui(t.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(ex));
        v *= t;
    } else {
        mpz_class t;
        mpz_pow_ui(t.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(-ex));
        if (v % t != 0) throw std::invalid_argument("height is not an integer: " + s);
        v /= t;
    }
    if (v < 1 || !fits_i128(v)) throw std::invalid_argument("height out of range: " + s);
    return from_mpz(v);
}

// ---------------------------------------------------------------- region

namespace {

struct Shape {
    std::span<const Term> f, g;
    double den;
    double wa, wb;  // a = r^wa cos, b = r^wb sin
    double nf, ng;  // f scales as r^nf, g as r^ng
};

Shape shape_of(Group G) {
    const auto& mp = model_polys(G);
    if (torsion_group(G).large)
        return {mp.f, mp.g, static_cast<double>(mp.den), 1, 1, static_cast<double>(mp.deg_f),
                static_cast<double>(mp.deg_g)};
    return {mp.f, mp.g, static_cast<double>(mp.den), static_cast<double>(mp.wa), static_cast<double>(mp.wb), 4,
            6};
}

double eval_d(std::span<const Term> t, double a, double b, double den) {
    double s = 0;
    for (const auto& x : t) s += static_cast<double>(x.c) * std::pow(a, x.i) * std::pow(b, x.j);
    return s / den;
}

double rho(const Shape& sh, double th) {
    const double c = std::cos(th), s = std::sin(th);
    const double F = std::fabs(eval_d(sh.f, c, s, sh.den));
    const double Gv = std::fabs(eval_d(sh.g, c, s, sh.den));
    const double rf = F > 0 ? std::pow(F, -1.0 / sh.nf) : INFINITY;
    const double rg = Gv > 0 ? std::pow(Gv, -1.0 / sh.ng) : INFINITY;
    return std::min(rf, rg);
}

double integrand(const Shape& sh, double th) {
    const double r = rho(sh, th);
    const double c = std::cos(th), s = std::sin(th);
    return std::pow(r, sh.wa + sh.wb) * (sh.wa * c * c + sh.wb * s * s) / (sh.wa + sh.wb);
}

struct Simpson {
    std::function<double(double)> h;
    double err = 0;
    int depth_hit = 0;

    double rec(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
        const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
        const double flm = h(lm), frm = h(rm);
        const double left = (m - a) / 6 * (fa + 4 * flm + fm);
        const double right = (b - m) / 6 * (fm + 4 * frm + fb);
        const double diff = left + right - whole;
        if (depth <= 0) {
            ++depth_hit;
            err += std::fabs(diff) / 15;
            return left + right + diff / 15;
        }
        if (std::fabs(diff) <= 15 * tol) {
            err += std::fabs(diff) / 15;
            return left + right + diff / 15;
        }
        return rec(a, m, fa, flm, fm, left, tol / 2, depth - 1) + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1);
    }

    double run(double a, double b, double tol, int panels) {
        double total = 0;
        const double w = (b - a) / panels;
        for (int k = 0; k < panels; ++k) {
            const double x0 = a + k * w, x1 = x0 + w, xm = (x0 + x1) / 2;
            const double f0 = h(x0), f1 = h(x1), fm = h(xm);
            total += rec(x0, x1, f0, fm, f1, w / 6 * (f0 + 4 * fm + f1), tol / panels, 40);
        }
        return total;
    }
};

std::pair<double, double> extents(const Shape& sh) {
    const int N = 1 << 16;
    const double two_pi = 2 * std::numbers::pi;
    auto fa = [&](double th) { return std::pow(rho(sh, th), sh.wa) * std::fabs(std::cos(th)); };
    auto fb = [&](double th) { return std::pow(rho(sh, th), sh.wb) * std::fabs(std::sin(th)); };
    auto best = [&](const std::function<double(double)>& fn) {
        std::vector<std::pair<double, int>> v;
        v.reserve(N);
        for (int k = 0; k < N; ++k) {
            const double y = fn(two_pi * k / N);
            if (!std::isfinite(y)) throw RegionError("region R_G(1) is unbounded");
            v.push_back({y, k});
        }
        std::partial_sort(v.begin(), v.begin() + 16, v.end(), std::greater<>());
        double m = v[0].first;
        // golden-section refinement around the best samples
        for (int t = 0; t < 16; ++t) {
            double lo = two_pi * (v[t].second - 1) / N, hi = two_pi * (v[t].second + 1) / N;
            const double gr = (std::sqrt(5.0) - 1) / 2;
            for (int it = 0; it < 60; ++it) {
                const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
                if (fn(x1) > fn(x2))
                    hi = x2;
                else
                    lo = x1;
            }
            m = std::max(m, fn((lo + hi) / 2));
        }
        return m;
    };
    return {best(fa), best(fb)};
}

}  // namespace

RegionArea region_area(Group G, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("region_area: tol must be positive");
    if (G == Group::Trivial) return {G, 4.0, 0.0, 1.0, 1.0};
    const Shape sh = shape_of(G);
    auto [am, bm] = extents(sh);
    Simpson s{[&](double th) { return integrand(sh, th); }};
    const double two_pi = 2 * std::numbers::pi;
    // successive refinement: double the panel count until two runs agree
    double prev = s.run(0, two_pi, tol, 256);
    for (int panels = 512; panels <= 1 << 14; panels *= 2) {
        Simpson t{s.h};
        const double cur = t.run(0, two_pi, tol / 4, panels);
        if (std::fabs(cur - prev) < tol && t.err < tol) return {G, cur, std::fabs(cur - prev) + t.err, am, bm};
        prev = cur;
    }
    throw RegionError(std::string("region_area: no convergence for G = ") + torsion_group(G).label);
}

double region_area_grid(Group G, int n) {
    if (G == Group::Trivial) return 4.0;
    const Shape sh = shape_of(G);
    auto [am, bm] = extents(sh);
    am *= 1.05;
    bm *= 1.05;
    const double da = 2 * am / n, db = 2 * bm / n;
    i64 inside = 0;
    for (int i = 0; i < n; ++i) {
        const double a = -am + (i + 0.5) * da;
        for (int j = 0; j < n; ++j) {
            const double b = -bm + (j + 0.5) * db;
            if (std::fabs(eval_d(sh.f, a, b, sh.den)) <= 1 && std::fabs(eval_d(sh.g, a, b, sh.den)) <= 1) ++inside;
        }
    }
    return static_cast<double>(inside) * da * db;
}

// ---------------------------------------------------------------- defect lifting

namespace {

int vl(const mpz_class& x, unsigned long l) {
    if (x == 0) return 1 << 20;
    mpz_class t = x;
    return static_cast<int>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), mpz_class(l).get_mpz_t()));
}

// Coefficients of f(x, 1) (x_is_a) or f(1, y) in the free variable.
std::vector<mpz_class> univariate(std::span<const Term> terms, bool x_is_a) {
    std::vector<mpz_class> c;
    for (const auto& t : terms) {
        const auto k = static_cast<std::size_t>(x_is_a ? t.i : t.j);
        if (c.size() <= k) c.resize(k + 1, 0);
        c[k] += t.c;
    }
    return c;
}

// Valuation of f on the class x0 + l^k Z_l: exact value, or a lower bound.
struct ClassVal {
    int v;
    bool exact;
};

ClassVal class_valuation(const std::vector<mpz_class>& c, const mpz_class& x0, int k, unsigned long l) {
    // Taylor coefficients at x0 by repeated synthetic division
    std::vector<mpz_class> q(c);
    const std::size_t n = q.size();
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t i = n - 1; i > j; --i) q[i - 1] += x0 * q[i];
    const int at0 = vl(q[0], l);
    int rest = 1 << 20;
    for (std::size_t j = 1; j < n; ++j)
        if (q[j] != 0) rest = std::min(rest, vl(q[j], l) + static_cast<int>(j) * k);
    if (at0 < rest) return {at0, true};
    return {rest, false};
}

struct LiftPolys {
    std::vector<mpz_class> f, g;
};

// Haar measure of each defect exponent m = v_l(e) over a residue class.
void lift(const LiftPolys& lp, unsigned long l, const mpz_class& x0, int k, double mu, std::map<int, double>& dist,
          int depth_cap) {
    const ClassVal F = class_valuation(lp.f, x0, k, l);
    const ClassVal Gv = class_valuation(lp.g, x0, k, l);
    const int mf = F.v / 4, mg = Gv.v / 6;  // exact, or lower bounds
    int m = -1;
    if (F.exact && Gv.exact)
        m = std::min(mf, mg);
    else if (F.exact && mg >= mf)
        m = mf;
    else if (Gv.exact && mf >= mg)
        m = mg;
    if (m >= 0) {
        dist[m] += mu;
        return;
    }
    if (k >= depth_cap) throw std::runtime_error("defect lifting did not terminate");
    mpz_class lk;
    mpz_ui_pow_ui(lk.get_mpz_t(), l, static_cast<unsigned long>(k));
    for (unsigned long t = 0; t < l; ++t) lift(lp, l, x0 + lk * t, k + 1, mu / static_cast<double>(l), dist, depth_cap);
}

}  // namespace

DefectStats defect_statistics(Group G) {
    const auto& tg = torsion_group(G);
    DefectStats st{G, {{1, 1.0}}, 1.0, 1};
    if (!tg.large) return st;
    const auto& mp = model_polys(G);
    const double w = 12.0 / tg.d;
    for (unsigned long l : {2UL, 3UL, 5UL, 7UL}) {
        std::map<int, double> dist;
        const double L = static_cast<double>(l);
        // pairs with l not dividing b: x = a/b uniform in Z_l
        lift({univariate(mp.f, true), univariate(mp.g, true)}, l, 0, 0, L / (L + 1), dist, 400);
        // l | b, l not dividing a: y = b/a uniform in lZ_l
        lift({univariate(mp.f, false), univariate(mp.g, false)}, l, 0, 1, 1 / (L + 1), dist, 400);
        double mean = 0;
        int mmax = 0;
        std::map<i64, double> next;
        for (auto [m, pr] : dist) {
            mean += pr * std::pow(L, w * m);
            mmax = std::max(mmax, m);
            i64 lm = 1;
            for (int i = 0; i < m; ++i) lm *= static_cast<i64>(l);
            for (auto [e, q] : st.distribution) next[e * lm] += q * pr;
        }
        st.distribution = next;
        st.mean_weight *= mean;
        for (int i = 0; i < mmax; ++i) st.eps_max *= static_cast<i64>(l);
    }
    return st;
}

double c_constant(Group G, double tol) {
    const auto& tg = torsion_group(G);
    if (G == Group::Trivial) return 4.0 / std::riemann_zeta(10.0);
    const double area = region_area(G, tol).area;
    const double r = multiplicity(G);
    if (tg.large) return defect_statistics(G).mean_weight * area / (r * std::riemann_zeta(2.0));
    const double two_delta = tg.is2x2 ? 2.0 : 1.0;
    return area / (two_delta * r * std::riemann_zeta(12.0 / tg.d));
}

// ---------------------------------------------------------------- enumeration

namespace {

struct Box {
    i64 A, B;     // |a| <= A, |b| <= B
    mpz_class Xscan;   // R(Xscan) is the scanned region
};

i64 iroot_floor(i128 X, int k) {
    i64 r = static_cast<i64>(std::pow(static_cast<long double>(X), 1.0L / k));
    auto pw = [k](i64 v) {
        mpz_class t = v, out;
        mpz_pow_ui(out.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(k));
        return out;
    };
    const mpz_class Xz = to_mpz(X);
    while (r > 0 && pw(r) > Xz) --r;
    while (pw(r + 1) <= Xz) ++r;
    return r;
}

Box box_for(Group G, i128 X, const RegionArea& ra, i64 eps_max) {
    const auto& tg = torsion_group(G);
    const long double margin = 1.05L;
    if (tg.large) {
        mpz_class e12 = 1;
        for (int i = 0; i < 12; ++i) e12 *= eps_max;
        const mpz_class xs = e12 * to_mpz(X);
        const long double lam =
            std::pow(static_cast<long double>(xs.get_d()), 1.0L / (3.0L * model_polys(G).deg_f));
        if (!(ra.amax * margin * lam < 1e9L && ra.bmax * margin * lam < 1e9L))
            throw std::overflow_error("census: scan box too large");
        return {static_cast<i64>(ra.amax * margin * lam) + 1, static_cast<i64>(ra.bmax * margin * lam) + 1, xs};
    }
    const auto& mp = model_polys(G);
    const long double lam = std::pow(static_cast<long double>(X), 1.0L / 12.0L);
    return {static_cast<i64>(ra.amax * margin * std::pow(lam, static_cast<long double>(mp.wa))) + 1,
            static_cast<i64>(ra.bmax * margin * std::pow(lam, static_cast<long double>(mp.wb))) + 1, to_mpz(X)};
}

bool in_region(const Values& v, i128 X) {
    if (v.small) return height_at_most(v.f, v.g, X);
    return height_at_most_mpz(v.F, v.Gz, to_mpz(X));
}

bool in_region(const Values& v, const mpz_class& X) {
    if (v.small) return height_at_most_mpz(to_mpz(v.f), to_mpz(v.g), X);
    return height_at_most_mpz(v.F, v.Gz, X);
}

i64 gcd64(i64 a, i64 b) { return static_cast<i64>(gcd128(a, b)); }

// (A, B) / (d^4, d^6) with d maximal
CurveQ minimal_twist(i128 A, i128 B) {
    const i128 g = A != 0 ? gcd128(abs128(A), abs128(B)) : abs128(B);
    for (i128 q = 2;; ++q) {
        const i128 q4 = q * q * q * q;
        if (A != 0 ? q4 > g : q4 * q * q > abs128(B)) break;
        while (A % q4 == 0 && B % (q4 * q * q) == 0 && (A != 0 || B != 0)) {
            A /= q4;
            B /= q4 * q * q;
        }
    }
    return {A, B};
}

struct Partial {
    std::map<CurveQ, i64> hits;  // exact preimages; 0 for twist-only images
    i64 scanned = 0;
    i64 singular = 0;
};

void scan_small(Group G, i128 X, const Box& box, i64 a0, int stride, Partial& out) {
    const bool parity = torsion_group(G).is2x2;
    for (i64 a = -box.A + a0; a <= box.A; a += stride)
        for (i64 b = -box.B; b <= box.B; ++b) {
            if (parity && mod(a - b, 2) != 0) continue;
            Values v = eval_fg(G, a, b);
            if (!in_region(v, X)) continue;
            ++out.scanned;
            if (!v.small) {
                v.f = from_mpz(v.F);
                v.g = from_mpz(v.Gz);
            }
            if (v.f == 0 && v.g == 0) {
                ++out.singular;
                continue;
            }
            if (is_singular(v.f, v.g)) {
                ++out.singular;
                continue;
            }
            CurveQ c = minimal_twist(v.f, v.g);
            auto& h = out.hits[c];
            if (c.A == v.f && c.B == v.g) ++h;
        }
}

void scan_large(Group G, i128 X, const Box& box, i64 a0, int stride, Partial& out) {
    const mpz_class Xz = to_mpz(X);
    for (i64 a = -box.A + a0; a <= box.A; a += stride)
        for (i64 b = -box.B; b <= box.B; ++b) {
            if (gcd64(a, b) != 1) continue;
            Values v = eval_fg(G, a, b);
            if (!in_region(v, box.Xscan)) continue;
            ++out.scanned;
            mpz_class F = v.small ? to_mpz(v.f) : v.F;
            mpz_class Gz = v.small ? to_mpz(v.g) : v.Gz;
            for (i64 l : {2, 3, 5, 7}) {
                const int m = std::min(vl(F, static_cast<unsigned long>(l)) / 4, vl(Gz, static_cast<unsigned long>(l)) / 6);
                for (int i = 0; i < m; ++i) {
                    F /= l * l * l * l;
                    Gz /= l * l * l * l * l * l;
                }
            }
            if (!height_at_most_mpz(F, Gz, Xz)) continue;
            if (4 * F * F * F + 27 * Gz * Gz == 0) {
                ++out.singular;
                continue;
            }
            ++out.hits[CurveQ{from_mpz(F), from_mpz(Gz)}];
        }
}

void scan_trivial(i128 X, Partial& out) {
    const i64 am = iroot_floor(X, 3), bm = iroot_floor(X, 2);
    for (i64 A = -am; A <= am; ++A)
        for (i64 B = -bm; B <= bm; ++B) {
            ++out.scanned;
            if (is_singular(A, B)) {
                ++out.singular;
                continue;
            }
            if (is_minimal(A, B)) out.hits[CurveQ{A, B}] = 1;
        }
}

// Membership of any integer pair in R_G(X), from the stored integer polynomials.
bool raw_in_region(Group G, i64 a, i64 b, const mpz_class& Xz) {
    const auto& mp = model_polys(G);
    const mpz_class A = a, B = b;
    auto ev = [&](std::span<const Term> terms) {
        mpz_class s = 0, pa, pb;
        for (const auto& t : terms) {
            mpz_pow_ui(pa.get_mpz_t(), A.get_mpz_t(), static_cast<unsigned long>(t.i));
            mpz_pow_ui(pb.get_mpz_t(), B.get_mpz_t(), static_cast<unsigned long>(t.j));
            s += t.c * pa * pb;
        }
        return s;
    };
    const mpz_class f = abs(ev(mp.f)), g = ev(mp.g), d = mp.den;
    return f * f * f <= d * d * d * Xz && g * g <= d * d * Xz;
}

// No point of the outer ring of the box may lie in the scanned region.
void check_closure(Group G, const Box& box) {
    auto fail = [&] {
        throw RegionError(std::string("census box does not close for G = ") + torsion_group(G).label);
    };
    for (i64 a = -box.A; a <= box.A; ++a)
        if (raw_in_region(G, a, box.B, box.Xscan) || raw_in_region(G, a, -box.B, box.Xscan)) fail();
    for (i64 b = -box.B; b <= box.B; ++b)
        if (raw_in_region(G, box.A, b, box.Xscan) || raw_in_region(G, -box.A, b, box.Xscan)) fail();
}

}  // namespace

i64 count_region_points(Group G, i128 X) {
    if (G == Group::Trivial) return (2 * iroot_floor(X, 3) + 1) * (2 * iroot_floor(X, 2) + 1);
    const Box box = box_for(G, X, region_area(G, 1e-3), 1);
    check_closure(G, box);
    i64 n = 0;
    for (i64 a = -box.A; a <= box.A; ++a)
        for (i64 b = -box.B; b <= box.B; ++b)
            if (raw_in_region(G, a, b, box.Xscan)) ++n;
    return n;
}

CensusResult enumerate(Group G, i128 X, int workers) {
    if (X < 1) throw std::invalid_argument("census: X must be >= 1");
    CensusResult res;
    res.G = G;
    res.X = X;
    workers = std::max(1, workers);
    std::vector<Partial> parts(static_cast<std::size_t>(workers));
    if (G == Group::Trivial) {
        workers = 1;
        parts.resize(1);
        scan_trivial(X, parts[0]);
        res.box_a = iroot_floor(X, 3);
        res.box_b = iroot_floor(X, 2);
    } else {
        const auto& tg = torsion_group(G);
        const RegionArea ra = region_area(G, 1e-4);
        const i64 eps = tg.large ? defect_statistics(G).eps_max : 1;
        const Box box = box_for(G, X, ra, eps);
        check_closure(G, box);
        res.box_a = box.A;
        res.box_b = box.B;
        auto job = [&](int k) {
            if (tg.large)
                scan_large(G, X, box, k, workers, parts[static_cast<std::size_t>(k)]);
            else
                scan_small(G, X, box, k, workers, parts[static_cast<std::size_t>(k)]);
        };
        if (workers == 1) {
            job(0);
        } else {
            std::vector<std::thread> th;
            for (int k = 0; k < workers; ++k) th.emplace_back(job, k);
            for (auto& t : th) t.join();
        }
    }
    std::map<CurveQ, i64> all;
    for (auto& p : parts) {
        res.pairs_scanned += p.scanned;
        res.singular_images += p.singular;
        for (auto& [c, h] : p.hits) all[c] += h;
    }
    res.curves.reserve(all.size());
    for (auto& [c, h] : all) {
        if (!height_at_most(c.A, c.B, X)) throw std::logic_error("census: image above height bound");
        res.curves.push_back(c);
        ++res.multiplicity[h];
    }
    return res;
}

i64 modal_multiplicity(const CensusResult& c) {
    i64 best = 0, bestn = -1;
    for (auto [m, n] : c.multiplicity)
        if (n > bestn) {
            best = m;
            bestn = n;
        }
    return best;
}

// ---------------------------------------------------------------- local conditions

std::string LocalCondition::str() const {
    switch (kind) {
        case LocalKind::Good: return "good";
        case LocalKind::Trace: return "trace:" + std::to_string(a);
        case LocalKind::Split: return "split";
        case LocalKind::Nonsplit: return "nonsplit";
        case LocalKind::Mult: return "mult";
        case LocalKind::Additive: return "additive";
        case LocalKind::Semistable: return "semistable";
    }
    return "?";
}

LocalCondition parse_local_condition(const std::string& s) {
    if (s == "good") return {LocalKind::Good};
    if (s == "split") return {LocalKind::Split};
    if (s == "nonsplit") return {LocalKind::Nonsplit};
    if (s == "mult") return {LocalKind::Mult};
    if (s == "additive") return {LocalKind::Additive};
    if (s == "semistable") return {LocalKind::Semistable};
    if (s.rfind("trace:", 0) == 0) {
        std::size_t used = 0;
        const std::string num = s.substr(6);
        i64 a = std::stoll(num, &used);
        if (used != num.size()) throw std::invalid_argument("bad local condition: " + s);
        return {LocalKind::Trace, a};
    }
    throw std::invalid_argument("bad local condition: " + s);
}

bool satisfies(const LocalData& ld, const LocalCondition& lc) {
    switch (lc.kind) {
        case LocalKind::Good: return ld.reduction == Reduction::Good;
        case LocalKind::Trace: return ld.reduction == Reduction::Good && ld.a_p == lc.a;
        case LocalKind::Split: return ld.reduction == Reduction::SplitMult;
        case LocalKind::Nonsplit: return ld.reduction == Reduction::NonsplitMult;
        case LocalKind::Mult: return is_multiplicative(ld.reduction);
        case LocalKind::Additive: return ld.reduction == Reduction::Additive;
        case LocalKind::Semistable: return ld.reduction != Reduction::Additive;
    }
    return false;
}

std::vector<LocalData> local_data(const CensusResult& c, i64 p, ApCache* cache) {
    std::vector<LocalData> out;
    out.reserve(c.curves.size());
    if (p < 5) {
        for (const auto& e : c.curves) out.push_back(local_reduction(e.A, e.B, p));
        return out;
    }
    PrimeModulus pm(p);
    for (const auto& e : c.curves) {
        if (cache) {
            if (auto hit = cache->find(e.A, e.B, p)) {
                out.push_back(*hit);
                continue;
            }
        }
        LocalData ld = reduction_type(e.A, e.B, pm);
        if (cache) cache->insert(e.A, e.B, p, ld);
        out.push_back(ld);
    }
    return out;
}

double predicted_density(Group G, i64 p, const LocalCondition& lc) {
    PrimeModulus pm(p);
    const auto t = build_weight_table(G, pm);
    std::optional<TraceTable> tt;
    if (lc.kind == LocalKind::Trace) tt.emplace(pm);
    double mass = 0;
    for (i64 A = 0; A < p; ++A)
        for (i64 B = 0; B < p; ++B) {
            if (A == 0 && B == 0) continue;
            const u64 w = t.at(A, B);
            if (!w) continue;
            LocalData ld;
            if (!CurveModP(A, B, pm).singular()) {
                ld.reduction = Reduction::Good;
                ld.a_p = tt ? tt->trace(A, B) : 0;
            } else {
                ld = reduction_type(A, B, pm);
            }
            if (satisfies(ld, lc)) mass += static_cast<double>(w);
        }
    LocalData zero;
    zero.reduction = Reduction::Additive;
    const bool zero_in = satisfies(zero, lc);
    const double P = static_cast<double>(p), w00 = static_cast<double>(t.at(0, 0));
    if (torsion_group(G).large) return (mass + (zero_in ? w00 - 1 : 0)) / (P * P - 1);
    const double k = 12.0 * count_exponent(G);
    const double pk = std::pow(P, -k);
    return (mass / (P * P) + (zero_in ? w00 / (P * P) - pk : 0)) / (1 - pk);
}

namespace {
DensityReport finish(i64 count, i64 total, double predicted) {
    DensityReport r;
    r.count = count;
    r.total = total;
    r.density = total ? static_cast<double>(count) / static_cast<double>(total) : 0;
    r.predicted = predicted;
    const double expected = predicted * static_cast<double>(total);
    if (expected > 0) {
        r.tolerance = 3 / std::sqrt(expected);
        r.ok = std::fabs(r.density / predicted - 1) <= r.tolerance;
    } else {
        r.tolerance = 0;
        r.ok = count == 0;
    }
    return r;
}
}  // namespace

DensityReport local_density(const CensusResult& c, const std::vector<LocalData>& data, i64 p,
                            const LocalCondition& lc) {
    i64 n = 0;
    for (const auto& ld : data)
        if (satisfies(ld, lc)) ++n;
    return finish(n, static_cast<i64>(data.size()), predicted_density(c.G, p, lc));
}

DensityReport local_density(const CensusResult& c, i64 p, const LocalCondition& lc) {
    return local_density(c, local_data(c, p), p, lc);
}

DensityReport joint_density(const CensusResult& c, const std::vector<std::pair<i64, LocalCondition>>& conds) {
    if (conds.empty()) throw std::invalid_argument("joint_density: no conditions");
    std::vector<std::vector<LocalData>> data;
    for (std::size_t i = 0; i < conds.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (conds[j].first == conds[i].first) throw std::invalid_argument("joint_density: repeated prime");
        data.push_back(local_data(c, conds[i].first));
    }
    const double N = static_cast<double>(c.size());
    double product = 1;
    i64 joint = 0;
    for (std::size_t i = 0; i < conds.size(); ++i) {
        i64 n = 0;
        for (const auto& ld : data[i])
            if (satisfies(ld, conds[i].second)) ++n;
        product *= N > 0 ? static_cast<double>(n) / N : 0;
    }
    for (std::size_t k = 0; k < c.size(); ++k) {
        bool all = true;
        for (std::size_t i = 0; i < conds.size() && all; ++i) all = satisfies(data[i][k], conds[i].second);
        if (all) ++joint;
    }
    return finish(joint, static_cast<i64>(c.size()), product);
}

double mult_weight_ratio(Group G, i64 p) {
    auto r = reduction_weights(build_weight_table(G, PrimeModulus(p)));
    return static_cast<double>(r.split + r.nonsplit) / static_cast<double>(p - 1);
}

std::vector<CheckLine> corollary_checks(const std::map<Group, CensusResult>& censuses, const std::vector<i64>& primes) {
    std::vector<CheckLine> out;
    auto label = [](Group G) { return std::string(torsion_group(G).label); };
    const std::map<Group, double> cusps_small = {
        {Group::Z2, 2}, {Group::Z3, 2}, {Group::Z4, 3}, {Group::Z2xZ2, 3}};
    std::map<std::pair<Group, i64>, std::vector<LocalData>> data;
    for (const auto& [G, c] : censuses)
        for (i64 p : primes) data[{G, p}] = local_data(c, p);

    for (const auto& [G, c] : censuses)
        for (i64 p : primes) {
            const auto& d = data[{G, p}];
            auto r = local_density(c, d, p, {LocalKind::Semistable});
            const double P = static_cast<double>(p);
            const double expected = 1 - 1 / (P * P);
            const double tol = 3 / std::sqrt(expected * static_cast<double>(c.size()));
            out.push_back({"semistable G=" + label(G) + " p=" + std::to_string(p), r.density, expected, tol,
                           std::fabs(r.density / expected - 1) <= tol});
        }

    if (auto it = censuses.find(Group::Z3); it != censuses.end())
        for (i64 p : primes) {
            const auto& d = data[{Group::Z3, p}];
            i64 split = 0, mult = 0;
            for (const auto& ld : d) {
                if (ld.reduction == Reduction::SplitMult) ++split;
                if (is_multiplicative(ld.reduction)) ++mult;
            }
            const i64 m = p % 12;
            const double expected = m == 1 ? 1.0 : (m == 7 ? 0.0 : 0.5);
            const double obs = mult ? static_cast<double>(split) / static_cast<double>(mult) : 0;
            out.push_back({"split/mult G=3 p=" + std::to_string(p), obs, expected, 0.1,
                           std::fabs(obs - expected) <= 0.1});
        }

    // multiplicative mass ratios from the census against cusp counts, relative to Z/2
    if (auto base = censuses.find(Group::Z2); base != censuses.end())
        for (i64 p : primes) {
            auto c_mult = [&](Group G) {
                const auto& c = censuses.at(G);
                const auto& d = data[{G, p}];
                i64 n = 0;
                for (const auto& ld : d)
                    if (is_multiplicative(ld.reduction)) ++n;
                const double k = 12.0 * count_exponent(G);
                const double P = static_cast<double>(p);
                const double factor = std::pow(P, k) / (std::pow(P, k) - 1);
                return std::pair<double, i64>{static_cast<double>(n) / static_cast<double>(c.size()) / factor, n};
            };
            auto [b, nb] = c_mult(Group::Z2);
            for (const auto& [G, k] : cusps_small) {
                if (G == Group::Z2 || !censuses.count(G)) continue;
                auto [x, nx] = c_mult(G);
                const double tol = 3 * std::sqrt(1.0 / static_cast<double>(std::max<i64>(nx, 1)) +
                                                 1.0 / static_cast<double>(std::max<i64>(nb, 1)));
                const double expected = k / cusps_small.at(Group::Z2);
                out.push_back({"cusp ratio " + label(G) + ":2 p=" + std::to_string(p), x / b, expected,
                               tol * expected, std::fabs(x / b - expected) <= tol * expected});
            }
        }

    // exact multiplicative mass / (p-1) from weight tables
    for (const auto& [G, k] : cusps_small)
        for (i64 p : primes) {
            const double r = mult_weight_ratio(G, p);
            out.push_back({"cusps " + label(G) + " p=" + std::to_string(p), r, k, 0, r == k});
        }
    const std::pair<Group, double> large_cusps[] = {
        {Group::Z5, 4}, {Group::Z6, 4}, {Group::Z7, 6},  {Group::Z8, 6},    {Group::Z9, 8},
        {Group::Z10, 8}, {Group::Z12, 10}, {Group::Z2xZ4, 4}, {Group::Z2xZ6, 6}, {Group::Z2xZ8, 10}};
    for (const auto& [G, k] : large_cusps) {
        // smallest favorable prime: the one whose singular sum is k p - (k - 1)
        for (i64 p : primes_between(11, 400)) {
            auto e = expected_singular_sum(G, p);
            if (!e || *e != static_cast<i64>(k) * p - (static_cast<i64>(k) - 1)) continue;
            const double r = mult_weight_ratio(G, p);
            out.push_back({"cusps " + label(G) + " p=" + std::to_string(p), r, k, 0, r == k});
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------- persistence

void save_census(const CensusResult& c, const std::string& path) {
    {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        for (const auto& e : c.curves) out << to_string(e.A) << ' ' << to_string(e.B) << '\n';
    }
    nlohmann::ordered_json j;
    j["format"] = "torrank census v1";
    j["polys"] = polynomial_checksum();
    j["group"] = torsion_group(c.G).label;
    j["X"] = to_string(c.X);
    j["count"] = c.size();
    j["pairs_scanned"] = c.pairs_scanned;
    j["singular_images"] = c.singular_images;
    j["box_a"] = c.box_a;
    j["box_b"] = c.box_b;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (auto [k, n] : c.multiplicity) m[std::to_string(k)] = n;
    j["multiplicity"] = m;
    std::ofstream out(path + ".json");
    if (!out) throw std::runtime_error("cannot write " + path + ".json");
    out << j.dump(2) << '\n';
}

CensusResult load_census(const std::string& path) {
    const std::string meta = path + ".json";
    std::ifstream jin(meta);
    if (!jin) throw CacheError(meta, 0, "missing census metadata");
    nlohmann::json j;
    try {
        jin >> j;
    } catch (const std::exception& e) {
        throw CacheError(meta, 1, std::string("unreadable metadata: ") + e.what());
    }
    if (j.value("format", "") != "torrank census v1") throw CacheError(meta, 1, "unknown census format");
    if (j.value("polys", "") != polynomial_checksum()) throw CacheError(meta, 1, "polynomial checksum mismatch");
    CensusResult c;
    try {
        c.G = parse_group(j.at("group").get<std::string>());
        c.X = parse_i128(j.at("X").get<std::string>());
        c.pairs_scanned = j.at("pairs_scanned").get<i64>();
        c.singular_images = j.at("singular_images").get<i64>();
        c.box_a = j.at("box_a").get<i64>();
        c.box_b = j.at("box_b").get<i64>();
        for (auto& [k, v] : j.at("multiplicity").items()) c.multiplicity[std::stoll(k)] = v.get<i64>();
    } catch (const std::exception& e) {
        throw CacheError(meta, 1, std::string("bad metadata: ") + e.what());
    }
    std::ifstream in(path);
    if (!in) throw CacheError(path, 0, "missing census file");
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        std::istringstream ss(line);
        std::string a, b, extra;
        if (!(ss >> a >> b) || (ss >> extra)) throw CacheError(path, ln, "expected \"A B\"");
        CurveQ e;
        try {
            e = {parse_i128(a), parse_i128(b)};
        } catch (const std::exception&) {
            throw CacheError(path, ln, "bad integer");
        }
        if (!height_at_most(e.A, e.B, c.X)) throw CacheError(path, ln, "height above X");
        if (!is_minimal(e.A, e.B)) throw CacheError(path, ln, "model not minimal");
        if (is_singular(e.A, e.B)) throw CacheError(path, ln, "singular model");
        if (!c.curves.empty() && !(c.curves.back() < e)) throw CacheError(path, ln, "records not sorted");
        c.curves.push_back(e);
    }
    if (c.curves.size() != j.at("count").get<std::size_t>()) throw CacheError(path, ln, "record count mismatch");
    return c;
}

std::string tally_tsv(const CensusResult& c, i64 p, const std::vector<LocalCondition>& conds) {
    std::ostringstream out;
    const auto data = local_data(c, p);
    for (const auto& lc : conds) {
        auto r = local_density(c, data, p, lc);
        out << torsion_group(c.G).label << '\t' << to_string(c.X) << '\t' << p << '\t' << lc.str() << '\t'
            << r.count << '\t' << fmt12(r.predicted * static_cast<double>(r.total)) << '\n';
    }
    return out.str();
}

}  // namespace torrank
