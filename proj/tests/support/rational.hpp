#pragma once
// Exact rational arithmetic on __int128, sized for the test oracles:
// binomial tails with M <= 30 and denominator-power-of-two probabilities,
// perfect-matching counts up to N = 12, hypergeometric CDFs up to N = 60.
// Overflow throws instead of wrapping.

#include <cstdint>
#include <stdexcept>

namespace testsupport {

using i128 = __int128;

inline i128 abs128(i128 v) { return v < 0 ? -v : v; }

inline i128 gcd128(i128 a, i128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational: mul overflow");
    return r;
}

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational: add overflow");
    return r;
}

struct Rational {
    i128 num = 0;
    i128 den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(i128 n, i128 d) : num(n), den(d) {
        if (den == 0) throw std::domain_error("rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        reduce();
    }

    void reduce() {
        i128 g = gcd128(num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    Rational operator+(const Rational& o) const {
        i128 g = gcd128(den, o.den);
        i128 da = den / g;
        i128 db = o.den / g;
        i128 n = checked_add(checked_mul(num, db), checked_mul(o.num, da));
        i128 d = checked_mul(den, db);
        return Rational(n, d);
    }
    Rational operator-(const Rational& o) const {
        return *this + Rational(-o.num, o.den);
    }
    Rational operator*(const Rational& o) const {
        // cross-reduce before multiplying to delay overflow
        i128 g1 = gcd128(num, o.den);
        i128 g2 = gcd128(o.num, den);
        return Rational(checked_mul(num / g1, o.num / g2),
                        checked_mul(den / g2, o.den / g1));
    }
    Rational operator/(const Rational& o) const {
        if (o.num == 0) throw std::domain_error("rational: divide by zero");
        return *this * Rational(o.den, o.num);
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const {
        // safe: reduced cross products fit after gcd cancellation in our sizes
        i128 g = gcd128(den, o.den);
        return checked_mul(num, o.den / g) < checked_mul(o.num, den / g);
    }

    long double to_long_double() const {
        return static_cast<long double>(num) / static_cast<long double>(den);
    }
    double to_double() const { return static_cast<double>(to_long_double()); }
};

inline Rational rat_pow(Rational base, int e) {
    Rational r(1);
    for (int i = 0; i < e; ++i) r = r * base;
    return r;
}

// binomial coefficient as an exact integer, C(60,30) still fits easily
inline i128 binom_i128(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    i128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = checked_mul(r, n - k + i);
        r /= i;
    }
    return r;
}

// exact binomial lower tail P[X < x_below] for X ~ B(trials, p)
inline Rational binom_tail_below_exact(int x_below, int trials, Rational p) {
    Rational q = Rational(1) - p;
    Rational sum(0);
    for (int l = 0; l < x_below && l <= trials; ++l) {
        Rational term(binom_i128(trials, l), 1);
        term = term * rat_pow(p, l) * rat_pow(q, trials - l);
        sum = sum + term;
    }
    if (x_below > trials) return Rational(1);
    return sum;
}

} // namespace testsupport
