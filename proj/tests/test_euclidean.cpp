#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "ultralab/euclidean.hpp"

using namespace ultralab;

namespace {

EuclideanScalar real(double v) { return EuclideanScalar(v); }
EuclideanScalar apow(double c, std::int64_t p, std::int64_t q = 1) {
    return EuclideanScalar::monomial(c, Rational(p, q));
}

// Random scalar on the dyadic lattice e0 - k/den, small term count so that
// products stay below the truncation order.
EuclideanScalar random_scalar(oracles::Rng& rng, int max_terms = 3) {
    const int n = rng.uniform_int(1, max_terms);
    const std::int64_t den = std::int64_t{1} << rng.uniform_int(0, 2);
    const std::int64_t e0 = rng.uniform_int(-3, 3);
    std::vector<Term> ts;
    for (int k = 0; k < n; ++k) {
        double c = rng.uniform(-4.0, 4.0);
        if (c == 0.0) c = 1.0;
        ts.push_back({Rational(e0 * den - k, den), c});
    }
    return EuclideanScalar::from_terms(ts);
}

} // namespace

TEST_CASE("addition merges terms and cancels exactly") {
    const auto x = add(real(2.0), apow(3.0, -1));
    const auto y = sub(real(1.0), apow(1.0, -1));
    const auto s = add(x, y);
    CHECK(s.coeff_at(Rational(0)) == 3.0);
    CHECK(s.coeff_at(Rational(-1)) == 2.0);
    CHECK(s.size() == 2);

    CHECK(add(EuclideanScalar::alpha(), -EuclideanScalar::alpha()).is_zero());

    oracles::Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto r = random_scalar(rng);
        CHECK(add(EuclideanScalar(), r) == r);
    }
}

TEST_CASE("multiplication convolves exponents") {
    CHECK(mul(EuclideanScalar::alpha(), apow(1.0, -1)) == real(1.0));

    const auto p = mul(add(real(1.0), apow(1.0, -1)), sub(real(1.0), apow(1.0, -1)));
    CHECK(p.coeff_at(Rational(0)) == 1.0);
    CHECK(p.coeff_at(Rational(-2)) == -1.0);
    CHECK(p.size() == 2);

    const auto q = mul(add(apow(2.0, 1), real(1.0)), apow(3.0, 1));
    CHECK(q.coeff_at(Rational(2)) == 6.0);
    CHECK(q.coeff_at(Rational(1)) == 3.0);
}

TEST_CASE("mixed exponent lattices multiply exactly") {
    const auto r = mul(apow(1.0, 1, 2), apow(1.0, 1, 3));
    REQUIRE(r.size() == 1);
    CHECK(r.terms().front().exponent == Rational(5, 6));
}

TEST_CASE("invert") {
    CHECK(invert(EuclideanScalar::alpha()) == apow(1.0, -1));
    CHECK_THROWS_AS(invert(EuclideanScalar()), std::domain_error);

    // invert(1 + a^-1) is the alternating geometric series; the multiply-back
    // residual starts at depth K of the lattice.
    const auto x = add(real(1.0), apow(1.0, -1));
    const auto xi = invert(x);
    const int K = xi.truncation_order();
    CHECK(xi.size() == static_cast<std::size_t>(K));
    for (int k = 0; k < 4; ++k)
        CHECK(xi.coeff_at(Rational(-k)) == (k % 2 == 0 ? 1.0 : -1.0));
    const auto resid = sub(mul(x, xi), real(1.0));
    for (const Term& t : resid.terms()) CHECK(t.exponent <= Rational(-K));
}

namespace {

// Every residual term at or above the exponent bound must be cancellation
// noise: its magnitude is compared against the absolute-value convolution of
// the factors at the same exponent (the mass that was meant to cancel).
bool residual_within_bound(const EuclideanScalar& x, const EuclideanScalar& xi,
                           const EuclideanScalar& resid, const Rational& bound) {
    std::vector<Term> ax, ai;
    for (const Term& t : x.terms()) ax.push_back({t.exponent, std::abs(t.coeff)});
    for (const Term& t : xi.terms()) ai.push_back({t.exponent, std::abs(t.coeff)});
    const auto mag = mul(EuclideanScalar::from_terms(ax, x.truncation_order()),
                         EuclideanScalar::from_terms(ai, x.truncation_order()));
    for (const Term& t : resid.terms()) {
        if (t.exponent < bound) continue;
        if (std::abs(t.coeff) > 1e-13 * mag.coeff_at(t.exponent)) return false;
    }
    return true;
}

} // namespace

TEST_CASE("invert multiply-back residual bound on random lattices") {
    oracles::Rng rng(99);
    for (int i = 0; i < 2000; ++i) {
        const auto x = random_scalar(rng);
        const auto xi = invert(x);
        const auto resid = sub(mul(x, xi), real(1.0));
        // lattice gap of x
        Rational g(0);
        for (std::size_t k = 1; k < x.terms().size(); ++k)
            g = rational_gcd(g, x.terms().front().exponent - x.terms()[k].exponent);
        if (g.is_zero()) {
            // monomial: the residual is at most reciprocal roundoff at a^0
            CHECK(residual_within_bound(x, xi, resid, Rational(-1000000)));
            continue;
        }
        const Rational bound = -g * Rational(x.truncation_order() - 1);
        CHECK(residual_within_bound(x, xi, resid, bound));
    }
}

TEST_CASE("compare is the sign of the leading difference") {
    CHECK(compare(apow(1.0, -1), real(0.0)) == std::partial_ordering::greater);
    CHECK(compare(EuclideanScalar::alpha(), real(1e6)) == std::partial_ordering::greater);
    CHECK(compare(add(real(3.0), apow(1.0, -1)), real(3.0)) == std::partial_ordering::greater);
    CHECK(compare(real(2.0), real(2.0)) == std::partial_ordering::equivalent);
}

TEST_CASE("standard part") {
    const auto x = add(add(real(3.0), apow(5.0, -1)), apow(-2.0, -2));
    CHECK(x.standard_part() == 3.0);
    CHECK(EuclideanScalar::alpha().standard_part() == std::numeric_limits<double>::infinity());
    CHECK(apow(-2.0, 3).standard_part() == -std::numeric_limits<double>::infinity());
    CHECK(real(7.0).standard_part() == 7.0);
    CHECK(EuclideanScalar().standard_part() == 0.0);
}

TEST_CASE("relate distinguishes monad, galaxy and beyond") {
    CHECK(relate(real(3.0), add(real(3.0), apow(1.0, -1))) == Relation::infinitely_close);
    CHECK(relate(EuclideanScalar::alpha(), add(EuclideanScalar::alpha(), real(5.0))) ==
          Relation::finitely_separated);
    CHECK(relate(real(0.0), EuclideanScalar::alpha()) == Relation::infinitely_separated);
}

TEST_CASE("relate is an equivalence on a finite sample") {
    oracles::Rng rng(5);
    std::vector<EuclideanScalar> xs;
    for (int i = 0; i < 12; ++i) xs.push_back(random_scalar(rng));
    auto close = [](const EuclideanScalar& a, const EuclideanScalar& b) {
        return relate(a, b) == Relation::infinitely_close;
    };
    for (const auto& x : xs) CHECK(close(x, x));
    for (const auto& x : xs)
        for (const auto& y : xs) CHECK(close(x, y) == close(y, x));
    for (const auto& x : xs)
        for (const auto& y : xs)
            for (const auto& z : xs)
                if (close(x, y) && close(y, z)) CHECK(close(x, z));
}

TEST_CASE("classify") {
    CHECK(apow(1.0, -2).classify().tag == OrderTag::infinitesimal);
    CHECK(add(real(3.0), apow(1.0, -1)).classify().tag == OrderTag::finite_nonzero_st);
    CHECK(apow(1.0, 1, 2).classify().tag == OrderTag::infinite);
    const auto zero = EuclideanScalar().classify();
    CHECK(zero.tag == OrderTag::infinitesimal);
    CHECK(!zero.leading_exponent.has_value());
}

namespace {

// Small dyadic coefficients: all sums/products in the laws below are exactly
// representable, so the laws hold bit-for-bit on the stored term lists.
EuclideanScalar random_dyadic_scalar(oracles::Rng& rng, int max_terms = 2) {
    const int n = rng.uniform_int(1, max_terms);
    const std::int64_t den = std::int64_t{1} << rng.uniform_int(0, 2);
    const std::int64_t e0 = rng.uniform_int(-3, 3);
    std::vector<Term> ts;
    for (int k = 0; k < n; ++k) {
        int c = rng.uniform_int(-32, 32);
        if (c == 0) c = 1;
        ts.push_back({Rational(e0 * den - k, den), static_cast<double>(c) / 8.0});
    }
    return EuclideanScalar::from_terms(ts);
}

} // namespace

TEST_CASE("field laws on truncation-safe random samples") {
    oracles::Rng rng(7);
    for (int i = 0; i < 3000; ++i) {
        const auto x = random_dyadic_scalar(rng);
        const auto y = random_dyadic_scalar(rng);
        const auto z = random_dyadic_scalar(rng);
        CHECK(add(x, y) == add(y, x));
        CHECK(add(add(x, y), z) == add(x, add(y, z)));
        CHECK(mul(x, y) == mul(y, x));
        CHECK(mul(mul(x, y), z) == mul(x, mul(y, z)));
        CHECK(mul(x, add(y, z)) == add(mul(x, y), mul(x, z)));
    }
    // commutativity needs no dyadic guard
    for (int i = 0; i < 1000; ++i) {
        const auto x = random_scalar(rng, 3);
        const auto y = random_scalar(rng, 3);
        CHECK(add(x, y) == add(y, x));
        CHECK(mul(x, y) == mul(y, x));
    }
}

TEST_CASE("order compatibility with field operations") {
    oracles::Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        const auto x = random_scalar(rng, 2);
        const auto y = random_scalar(rng, 2);
        const auto z = random_scalar(rng, 2);
        if (compare(x, y) != std::partial_ordering::greater) continue;
        CHECK(compare(add(x, z), add(y, z)) == std::partial_ordering::greater);
        auto w = random_scalar(rng, 2);
        if (w.leading() && w.leading()->coeff < 0.0) w = -w;
        if (w.is_zero()) continue;
        CHECK(compare(mul(x, w), mul(y, w)) == std::partial_ordering::greater);
    }
}

TEST_CASE("st is a ring morphism on finite elements") {
    oracles::Rng rng(17);
    int used = 0;
    for (int i = 0; i < 4000 && used < 1000; ++i) {
        auto x = random_scalar(rng, 2);
        auto y = random_scalar(rng, 2);
        if (!x.is_finite() || !y.is_finite()) continue;
        ++used;
        CHECK(add(x, y).standard_part() ==
              doctest::Approx(x.standard_part() + y.standard_part()).epsilon(1e-12));
        CHECK(mul(x, y).standard_part() ==
              doctest::Approx(x.standard_part() * y.standard_part()).epsilon(1e-12));
    }
    CHECK(used >= 500);
}

TEST_CASE("render/parse round-trips exactly") {
    oracles::Rng rng(23);
    for (int i = 0; i < 400; ++i) {
        const auto x = random_scalar(rng, 3);
        const auto back = EuclideanScalar::parse(x.render());
        REQUIRE(back.size() == x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            CHECK(back.terms()[k].exponent == x.terms()[k].exponent);
            CHECK(back.terms()[k].coeff == x.terms()[k].coeff);
        }
    }
    CHECK(EuclideanScalar::parse("0").is_zero());
    CHECK(EuclideanScalar::parse("3 + 2*a^-1").coeff_at(Rational(-1)) == 2.0);
    CHECK(EuclideanScalar::parse("1.5*a^-3/4").terms().front().exponent == Rational(-3, 4));
}

TEST_CASE("complexified scalars act componentwise") {
    const ComplexEuclidean z{add(real(2.0), apow(1.0, -1)), real(-3.0)};
    CHECK(z.standard_part() == std::complex<double>(2.0, -3.0));
    const ComplexEuclidean w{z.re, add(z.im, apow(4.0, -2))};
    CHECK(relate(w.im, z.im) == Relation::infinitely_close);
}

TEST_CASE("expression evaluator") {
    CHECK(eval_scalar_expression("st(3 + 5*a^-1)").render() == "3");
    CHECK(eval_scalar_expression("a * a^-1").render() == "1");
    CHECK(eval_scalar_expression("(1 + a^-1)*(1 - a^-1)").coeff_at(Rational(-2)) == -1.0);
    CHECK(eval_scalar_expression("inv(a)") == apow(1.0, -1));
    CHECK(eval_scalar_expression("2^3").render() == "8");
    CHECK(eval_scalar_expression("1/(1 - a^-1)").coeff_at(Rational(-1)) == 1.0);
    CHECK_THROWS_AS(eval_scalar_expression("3 +"), std::invalid_argument);
    CHECK_THROWS_AS(eval_scalar_expression("foo(2)"), std::invalid_argument);
}
