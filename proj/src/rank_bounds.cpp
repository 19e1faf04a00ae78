#include "torrank/rank_bounds.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace torrank {

namespace {

constexpr double kPi = std::numbers::pi;

mpq_class q(long n, long d = 1) {
    mpq_class r(n, d);
    r.canonicalize();
    return r;
}

mpz_class binom(int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

mpz_class factorial(int n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

mpq_class qpow(const mpq_class& x, int k) {
    mpq_class r = 1;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// sum over even k <= s of C(s,k) (1/2)^{s-k} k! (1/6)^{k/2}
mpq_class pairing_sum(int s) {
    mpq_class t = 0;
    for (int k = 0; k <= s; k += 2) t += mpq_class(binom(s, k) * factorial(k)) * qpow(q(1, 2), s - k) * qpow(q(1, 6), k / 2);
    return t;
}

void require_n_level(Group G) {
    if (G != Group::Z2 && G != Group::Z2xZ2)
        throw UnsupportedBound(std::string("n-level bounds need G = 2 or 2x2, got ") + torsion_group(G).label);
}

SigmaDerivation min_of(Group G, std::vector<SigmaConstraint> cs) {
    mpq_class m = cs.front().bound;
    for (const auto& c : cs) m = std::min(m, c.bound);
    return {G, std::move(cs), m};
}

}  // namespace

double TestFunction::phi(double x) const {
    if (std::fabs(x) < 1e-9) return phi0();
    const double s = std::sin(kPi * sigma * x);
    return s * s / ((2 * kPi * x) * (2 * kPi * x));
}

double TestFunction::phi_hat(double u) const {
    const double a = std::fabs(u);
    return a <= sigma ? (sigma - a) / 4 : 0.0;
}

SigmaDerivation sigma_derivation(Group G) {
    const auto& tg = torsion_group(G);
    if (G == Group::Trivial || G == Group::Z2 || G == Group::Z2xZ2)
        throw UnsupportedBound(std::string("no average-rank sigma for G = ") + tg.label);
    const mpq_class de = q(1, tg.d) - q(1, tg.e);
    if (tg.large) {
        // S1: X^{(1/e - 1/d) + 5 sigma/2};  S2: X^{(1/e - 1/d) + sigma}
        return min_of(G, {{"S1 p^2 X^(1/e)", q(2, 5) * de}, {"S2 p X^(1/e)", de}});
    }
    const mpq_class d12 = q(1, tg.d) - q(1, 12);
    // S1: X^{1/e - 1/d + 3 sigma/2} + X^{1/12 - 1/d + 5 sigma/2};  S2: X^{1/e - 1/d + sigma/2} + X^{1/12 - 1/d + sigma}
    return min_of(G, {{"S1 p X^(1/e)", q(2, 3) * de},
                      {"S1 p^2 X^(1/12)", q(2, 5) * d12},
                      {"S2 X^(1/e)", 2 * de},
                      {"S2 p X^(1/12)", d12}});
}

mpq_class sigma_for(Group G) { return sigma_derivation(G).sigma; }

SigmaDerivation sigma_n_derivation(Group G, int n) {
    require_n_level(G);
    if (n < 1) throw std::invalid_argument("sigma_n: n must be >= 1");
    const auto& tg = torsion_group(G);
    const mpq_class de = q(1, tg.d) - q(1, tg.e), d12 = q(1, tg.d) - q(1, 12);
    return min_of(G, {{"X^(1/e) (X^(3 sigma/2))^n", q(2, 3 * n) * de}, {"X^(1/12) (X^(5 sigma/2))^n", q(2, 5 * n) * d12}});
}

mpq_class sigma_n(Group G, int n) { return sigma_n_derivation(G, n).sigma; }
mpq_class sigma_2n(Group G, int n) { return sigma_n(G, 2 * n); }

mpq_class average_rank_bound(Group G) {
    if (G == Group::Z2 || G == Group::Z2xZ2) return moment_bound(G, 1);
    return q(1, 2) + 1 / sigma_for(G);
}

mpq_class moment_bound(Group G, int n) {
    if (n < 1) throw std::invalid_argument("moment_bound: n must be >= 1");
    const mpq_class inv = 1 / sigma_n(G, n);
    mpq_class total = 0;
    // |S| = s; the inner sum depends only on s
    for (int s = 0; s <= n; ++s) total += mpq_class(binom(n, s)) * qpow(inv, n - s) * pairing_sum(s);
    return total;
}

TailBound tail_bound(Group G, const mpq_class& a) {
    require_n_level(G);
    if (a <= 1 / sigma_2n(G, 1))
        throw VacuousBound("tail_bound: threshold " + a.get_str() + " is at most 1/sigma_2 = " +
                           mpq_class(1 / sigma_2n(G, 1)).get_str());
    bool found = false;
    TailBound best{0, 0, 0};
    for (int n = 1; n <= 64; ++n) {
        const mpq_class s = sigma_2n(G, n);
        const mpq_class C = a * s - 1;
        if (C <= 0) continue;
        mpq_class num = 0;
        for (int k = 0; k <= n; ++k)
            num += mpq_class(binom(2 * n, 2 * k) * factorial(2 * k)) * qpow(q(1, 2), 2 * n - 2 * k) * qpow(q(1, 6), k);
        const mpq_class b = num / qpow(C / s, 2 * n);
        if (!found || b < best.bound) best = {b, n, C};
        found = true;
    }
    if (!found) throw VacuousBound("tail_bound: no admissible n");
    return best;
}

double hat_a(const LocalData& ld, i64 p, int e) {
    const double P = static_cast<double>(p);
    if (e != 1 && e != 2) throw std::invalid_argument("hat_a: e must be 1 or 2");
    switch (ld.reduction) {
        case Reduction::Good: {
            const double a = static_cast<double>(ld.a_p) / std::sqrt(P);
            return e == 1 ? a : a * a - 2;
        }
        case Reduction::SplitMult: return e == 1 ? 1 / std::sqrt(P) : 1 / P;
        case Reduction::NonsplitMult: return e == 1 ? -1 / std::sqrt(P) : 1 / P;
        case Reduction::Additive: return 0;
    }
    return 0;
}

PrimeSums empirical_S1_S2(const CensusResult& c, double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("empirical_S1_S2: sigma must be positive");
    if (c.curves.empty()) throw std::invalid_argument("empirical_S1_S2: empty census");
    const TestFunction f{sigma};
    const double L = std::log(static_cast<double>(c.X));
    const double n = static_cast<double>(c.size());
    PrimeSums out;
    out.target_S2 = -f.phi0() / 2;
    const i64 pmax = static_cast<i64>(std::floor(std::exp(sigma * L) + 1e-9));
    for (i64 p : primes_between(2, std::max<i64>(pmax, 2))) {
        const double lp = std::log(static_cast<double>(p));
        const double w1 = f.phi_hat(lp / L), w2 = f.phi_hat(2 * lp / L);
        if (w1 == 0 && w2 == 0) continue;
        double s1 = 0, s2 = 0;
        for (const auto& ld : local_data(c, p)) {
            s1 += hat_a(ld, p, 1);
            s2 += hat_a(ld, p, 2);
        }
        const double P = static_cast<double>(p);
        if (w1 > 0) {
            out.S1 += lp / std::sqrt(P) * w1 * s1;
            ++out.primes_S1;
        }
        if (w2 > 0) {
            out.S2 += lp / P * w2 * s2;
            ++out.primes_S2;
        }
    }
    out.S1 *= 2 / (L * n);
    out.S2 *= 2 / (L * n);
    return out;
}

int predicted_trace_constant(const std::vector<TraceFactor>& pattern) {
    if (pattern.empty()) throw std::invalid_argument("trace pattern is empty");
    std::set<i64> ps;
    int squares = 0;
    bool odd_first = false;
    for (const auto& t : pattern) {
        if (!is_prime(t.p)) throw std::invalid_argument("trace pattern: p must be prime");
        if (!ps.insert(t.p).second) throw std::invalid_argument("trace pattern: repeated prime");
        if (t.e == 1) {
            if (t.r < 1 || (t.r % 2 == 0 && t.r != 2)) throw std::invalid_argument("trace pattern: r must be odd or 2 when e = 1");
            if (t.r % 2 == 1) odd_first = true;
        } else if (t.e == 2) {
            if (t.r != 1) throw std::invalid_argument("trace pattern: r must be 1 when e = 2");
            ++squares;
        } else {
            throw std::invalid_argument("trace pattern: e must be 1 or 2");
        }
    }
    if (odd_first) return 0;
    return squares % 2 == 1 ? -1 : 1;
}

TraceCheck trace_formula_check(const CensusResult& c, const std::vector<TraceFactor>& pattern) {
    require_n_level(c.G);
    TraceCheck out{0, 0, predicted_trace_constant(pattern)};
    if (c.curves.empty()) throw std::invalid_argument("trace_formula_check: empty census");
    std::vector<double> prod(c.size(), 1.0);
    for (const auto& t : pattern) {
        const auto data = local_data(c, t.p);
        for (std::size_t i = 0; i < data.size(); ++i) prod[i] *= std::pow(hat_a(data[i], t.p, t.e), t.r);
    }
    for (double x : prod) out.lhs += x;
    const double z = std::riemann_zeta(12.0 / torsion_group(c.G).d);
    out.normalized = out.lhs * z / static_cast<double>(c.size());
    return out;
}

double abs_u_phi_hat_sq(double sigma) {
    const TestFunction f{sigma};
    // even integrand; composite Simpson on [0, sigma] (exact for the cubic)
    const int n = 1000;
    const double h = sigma / n;
    double s = 0;
    for (int k = 0; k <= n; ++k) {
        const double u = k * h, v = u * f.phi_hat(u) * f.phi_hat(u);
        s += v * (k == 0 || k == n ? 1 : (k % 2 ? 4 : 2));
    }
    return 2 * s * h / 3;
}

double fourier_phi(double sigma, double u) {
    const TestFunction f{sigma};
    const double L = 400 / sigma;
    const double freq = sigma + std::fabs(u);
    const long n = 2 * static_cast<long>(std::ceil(L * std::max(freq, sigma) * 40 / 2));
    const double h = L / static_cast<double>(n);
    double s = 0;
    for (long k = 0; k <= n; ++k) {
        const double x = static_cast<double>(k) * h;
        const double v = f.phi(x) * std::cos(2 * kPi * u * x);
        s += v * (k == 0 || k == n ? 1 : (k % 2 ? 4 : 2));
    }
    double total = 2 * s * h / 3;
    // phi = (1 - cos(2 pi sigma x)) / (8 pi^2 x^2), so the tail is a sum of int_L^inf cos(2 pi k x)/x^2
    auto tail = [L](double k) {
        if (std::fabs(k) < 1e-15) return 1 / L;
        return std::sin(2 * kPi * k * L) / (2 * kPi * k * L * L);
    };
    total += 2 / (8 * kPi * kPi) * (tail(u) - tail(u + sigma) / 2 - tail(u - sigma) / 2);
    return total;
}

}  // namespace torrank
