#include "torrank/ff.hpp"

#include <stdexcept>
#include <string>

namespace torrank {

PrimeModulus::PrimeModulus(i64 value) : p(value) {
    if (value < 5 || !is_prime(value))
        throw std::invalid_argument("modulus must be a prime >= 5, got " + std::to_string(value));
}

int legendre(i64 x, PrimeModulus p) {
    i64 r = mod(x, p.p);
    if (r == 0) return 0;
    return powmod(r, static_cast<u64>((p.p - 1) / 2), p.p) == 1 ? 1 : -1;
}

std::optional<i64> sqrt_mod(i64 x, PrimeModulus pm) {
    const i64 p = pm.p;
    i64 n = mod(x, p);
    if (n == 0) return 0;
    if (legendre(n, pm) != 1) return std::nullopt;
    i64 r;
    if (p % 4 == 3) {
        r = powmod(n, static_cast<u64>((p + 1) / 4), p);
    } else {
        // Tonelli-Shanks with the least non-residue, so results are reproducible.
        i64 q = p - 1;
        int s = 0;
        while (q % 2 == 0) {
            q /= 2;
            ++s;
        }
        i64 z = 2;
        while (legendre(z, pm) != -1) ++z;
        i64 c = powmod(z, static_cast<u64>(q), p);
        r = powmod(n, static_cast<u64>((q + 1) / 2), p);
        i64 t = powmod(n, static_cast<u64>(q), p);
        int m = s;
        while (t != 1) {
            int i = 0;
            i64 t2 = t;
            while (t2 != 1) {
                t2 = mulmod(t2, t2, p);
                ++i;
            }
            i64 b = c;
            for (int j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
            r = mulmod(r, b, p);
            c = mulmod(b, b, p);
            t = mulmod(t, c, p);
            m = i;
        }
    }
    return r <= (p - 1) / 2 ? r : p - r;
}

QuadExt qe_reduce(QuadExt x, PrimeModulus p) {
    return {mod(x.u, p.p), mod(x.v, p.p)};
}

QuadExt qe_mul(QuadExt x, QuadExt y, PrimeModulus pm) {
    const i64 p = pm.p;
    i64 u = mod(mulmod(x.u, y.u, p) - 3 * mulmod(x.v, y.v, p), p);
    i64 v = mod(mulmod(x.u, y.v, p) + mulmod(x.v, y.u, p), p);
    return {u, v};
}

QuadExt qe_pow(QuadExt x, u64 e, PrimeModulus p) {
    QuadExt r{1, 0};
    QuadExt b = qe_reduce(x, p);
    while (e) {
        if (e & 1) r = qe_mul(r, b, p);
        b = qe_mul(b, b, p);
        e >>= 1;
    }
    return r;
}

i64 qe_norm(QuadExt x, PrimeModulus pm) {
    const i64 p = pm.p;
    return mod(mulmod(x.u, x.u, p) + 3 * mulmod(x.v, x.v, p), p);
}

bool qe_is_unit(QuadExt x, PrimeModulus p) { return qe_norm(x, p) != 0; }

bool is_cube(i64 x, PrimeModulus pm) {
    const i64 p = pm.p;
    if (mod(x, p) == 0) throw std::domain_error("is_cube: zero is not a unit");
    if ((p - 1) % 3 != 0) return true;
    return powmod(x, static_cast<u64>((p - 1) / 3), p) == 1;
}

bool is_cube(QuadExt x, PrimeModulus pm) {
    const i64 p = pm.p;
    if (!qe_is_unit(x, pm)) throw std::domain_error("is_cube: element is not a unit");
    // Split case: units are (F_p^x)^2, exponent p-1. Inert case: F_{p^2}^x, cyclic.
    u64 exponent = (p % 3 == 1) ? static_cast<u64>(p - 1) : static_cast<u64>(p * p - 1);
    return qe_pow(x, exponent / 3, pm) == QuadExt{1, 0};
}

}  // namespace torrank
