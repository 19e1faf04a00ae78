#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace torrank {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

inline i64 mod(i64 x, i64 m) {
    i64 r = x % m;
    return r < 0 ? r + m : r;
}

inline i64 mod(i128 x, i64 m) {
    i64 r = static_cast<i64>(x % m);
    return r < 0 ? r + m : r;
}

inline i64 mulmod(i64 a, i64 b, i64 m) {
    return static_cast<i64>((static_cast<i128>(a) * b) % m);
}

i64 powmod(i64 base, u64 e, i64 m);
i64 invmod(i64 a, i64 m);  // throws if not invertible

i128 gcd128(i128 a, i128 b);
i128 abs128(i128 x);

bool is_prime(i64 n);
std::vector<i64> primes_between(i64 lo, i64 hi);

// Checked int128 arithmetic; throws std::overflow_error.
i128 checked_add(i128 a, i128 b);
i128 checked_mul(i128 a, i128 b);
i128 checked_pow(i128 a, unsigned e);

std::string to_string(i128 x);
i128 parse_i128(const std::string& s);

// Exact rational with int128 parts, always reduced, den > 0.
class Rational {
public:
    Rational() = default;
    Rational(i128 n) : num_(n) {}
    Rational(i128 n, i128 d);

    i128 num() const { return num_; }
    i128 den() const { return den_; }
    double to_double() const;
    long double to_long_double() const;
    std::string str() const;  // "n" or "n/d"

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const { return Rational(-num_, den_); }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

private:
    i128 num_ = 0;
    i128 den_ = 1;
};

Rational pow(const Rational& r, unsigned e);

// Floats for reports: 12 significant digits.
std::string fmt12(double x);

}  // namespace torrank
