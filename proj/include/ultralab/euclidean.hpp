#pragma once

#include <complex>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "ultralab/rational.hpp"

namespace ultralab {

/// One term c * a^e of a generalized power series in the infinite unit a.
struct Term {
    Rational exponent;
    double coeff = 0.0;
};

enum class OrderTag { infinitesimal, finite_nonzero_st, infinite };

/// Order classification of a scalar. For the zero scalar the leading
/// exponent is absent (conventionally -infinity) and the tag is infinitesimal.
struct OrderClass {
    OrderTag tag = OrderTag::infinitesimal;
    std::optional<Rational> leading_exponent;
};

enum class Relation { infinitely_close, finitely_separated, infinitely_separated };

/// Truncated generalized power series in one infinite unit `a`, the working
/// model of a scalar from the non-Archimedean field. Terms are kept sorted by
/// strictly decreasing exponent, zero coefficients are dropped, and at most
/// `truncation_order()` dominant terms are retained. Exponents are exact
/// rationals so order comparisons are exact; coefficients are doubles.
///
/// Values are immutable after construction; every operation returns a new value.
class EuclideanScalar {
public:
    static constexpr int kDefaultTruncation = 16;

    EuclideanScalar() = default;
    explicit EuclideanScalar(double real_value, int trunc = kDefaultTruncation);

    /// c * a^e as a one-term scalar.
    static EuclideanScalar monomial(double coeff, const Rational& exponent,
                                    int trunc = kDefaultTruncation);
    /// The infinite unit a itself.
    static EuclideanScalar alpha(int trunc = kDefaultTruncation);
    /// From a term list in any order; merges duplicates, drops zeros, truncates.
    static EuclideanScalar from_terms(std::vector<Term> terms, int trunc = kDefaultTruncation);

    const std::vector<Term>& terms() const { return terms_; }
    int truncation_order() const { return trunc_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Leading (largest-exponent) term; empty for zero.
    std::optional<Term> leading() const;
    /// Coefficient at an exact exponent (0 if absent).
    double coeff_at(const Rational& e) const;

    EuclideanScalar operator-() const;
    friend EuclideanScalar add(const EuclideanScalar& x, const EuclideanScalar& y);
    friend EuclideanScalar sub(const EuclideanScalar& x, const EuclideanScalar& y);
    friend EuclideanScalar mul(const EuclideanScalar& x, const EuclideanScalar& y);
    friend EuclideanScalar operator+(const EuclideanScalar& x, const EuclideanScalar& y) { return add(x, y); }
    friend EuclideanScalar operator-(const EuclideanScalar& x, const EuclideanScalar& y) { return sub(x, y); }
    friend EuclideanScalar operator*(const EuclideanScalar& x, const EuclideanScalar& y) { return mul(x, y); }

    /// Geometric-series inversion around the leading term, truncated. The
    /// multiply-back residual mul(x, invert(x)) - 1 only has exponents at or
    /// below -K * (gap of x's exponent lattice). Zero input is a domain error.
    friend EuclideanScalar invert(const EuclideanScalar& x);

    /// Sign of x - y by the leading coefficient of the difference.
    friend std::partial_ordering compare(const EuclideanScalar& x, const EuclideanScalar& y);
    friend bool operator==(const EuclideanScalar& x, const EuclideanScalar& y) {
        return compare(x, y) == std::partial_ordering::equivalent;
    }
    friend bool operator<(const EuclideanScalar& x, const EuclideanScalar& y) {
        return compare(x, y) == std::partial_ordering::less;
    }
    friend bool operator>(const EuclideanScalar& x, const EuclideanScalar& y) {
        return compare(x, y) == std::partial_ordering::greater;
    }

    /// Coefficient of a^0 for finite values, +-inf for infinite ones.
    double standard_part() const;
    OrderClass classify() const;
    bool is_finite() const;

    /// Monad/galaxy relation of x and y, decided on x - y.
    friend Relation relate(const EuclideanScalar& x, const EuclideanScalar& y);

    /// Text form `c0 + c1*a^q1 + ...` with rational exponents `p/q`;
    /// round-trips exactly through parse().
    std::string render() const;
    static EuclideanScalar parse(const std::string& text, int trunc = kDefaultTruncation);

private:
    void normalize();

    std::vector<Term> terms_;           // sorted by strictly decreasing exponent
    int trunc_ = kDefaultTruncation;
};

/// Complexification: re + i*im with componentwise series.
struct ComplexEuclidean {
    EuclideanScalar re;
    EuclideanScalar im;

    std::complex<double> standard_part() const { return {re.standard_part(), im.standard_part()}; }
};

/// Evaluates an expression over scalars: numbers, `a`, + - * / ^, parentheses,
/// and the functions st(x) and inv(x). Exponents after ^ are rational literals.
EuclideanScalar eval_scalar_expression(const std::string& text, int trunc = EuclideanScalar::kDefaultTruncation);

} // namespace ultralab
