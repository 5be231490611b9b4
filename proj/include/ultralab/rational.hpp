#pragma once

#include <cstdint>
#include <compare>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ultralab {

/// Exact rational number on int64, always stored normalized (gcd 1, q > 0).
/// Used for series exponents, where ordering must be exact.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1) : p_(num), q_(den) { normalize(); }

    std::int64_t num() const { return p_; }
    std::int64_t den() const { return q_; }

    bool is_zero() const { return p_ == 0; }
    bool is_integer() const { return q_ == 1; }
    double to_double() const { return static_cast<double>(p_) / static_cast<double>(q_); }

    Rational operator-() const { return Rational(-p_, q_, unchecked_tag{}); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_i128(i128(a.p_) * b.q_ + i128(b.p_) * a.q_, i128(a.q_) * b.q_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128(i128(a.p_) * b.p_, i128(a.q_) * b.q_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.p_ == 0) throw std::domain_error("Rational: division by zero");
        return from_i128(i128(a.p_) * b.q_, i128(a.q_) * b.p_);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.p_ == b.p_ && a.q_ == b.q_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const i128 lhs = i128(a.p_) * b.q_;
        const i128 rhs = i128(b.p_) * a.q_;
        return lhs < rhs ? std::strong_ordering::less
             : lhs > rhs ? std::strong_ordering::greater
                         : std::strong_ordering::equal;
    }

    std::string str() const {
        return q_ == 1 ? std::to_string(p_) : std::to_string(p_) + "/" + std::to_string(q_);
    }

private:
    using i128 = __int128;
    struct unchecked_tag {};
    Rational(std::int64_t p, std::int64_t q, unchecked_tag) : p_(p), q_(q) {}

    static Rational from_i128(i128 p, i128 q) {
        if (q < 0) { p = -p; q = -q; }
        const i128 g = gcd_i128(p < 0 ? -p : p, q);
        if (g > 1) { p /= g; q /= g; }
        if (p > INT64_MAX || p < INT64_MIN || q > INT64_MAX)
            throw std::overflow_error("Rational: exponent arithmetic overflow");
        Rational r;
        r.p_ = static_cast<std::int64_t>(p);
        r.q_ = static_cast<std::int64_t>(q);
        return r;
    }

    static i128 gcd_i128(i128 a, i128 b) {
        while (b != 0) { const i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        if (q_ == 0) throw std::domain_error("Rational: zero denominator");
        if (q_ < 0) { p_ = -p_; q_ = -q_; }
        const std::int64_t g = std::gcd(p_ < 0 ? -p_ : p_, q_);
        if (g > 1) { p_ /= g; q_ /= g; }
    }

    std::int64_t p_ = 0;
    std::int64_t q_ = 1;
};

/// Positive gcd of two rationals (lattice spacing of exponent sets).
inline Rational rational_gcd(const Rational& a, const Rational& b) {
    if (a.is_zero()) return b < Rational(0) ? -b : b;
    if (b.is_zero()) return a < Rational(0) ? -a : a;
    const std::int64_t q = std::lcm(a.den(), b.den());
    const std::int64_t pa = a.num() * (q / a.den());
    const std::int64_t pb = b.num() * (q / b.den());
    std::int64_t g = std::gcd(pa < 0 ? -pa : pa, pb < 0 ? -pb : pb);
    return Rational(g, q);
}

} // namespace ultralab
