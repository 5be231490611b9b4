#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "ultralab/grid.hpp"
#include "ultralab/ultrafunction.hpp"

using namespace ultralab;

TEST_CASE("chain rules") {
    const LevelChain chain(2, 9);
    CHECK(chain.h(3) == 0.125);
    CHECK(chain.alpha(3) == 64.0);
    CHECK(chain.naturals_section(3) == 64);
    for (int m = 3; m <= 9; ++m) {
        CHECK(chain.h(m) < chain.h(m - 1));
        CHECK(chain.alpha(m) > chain.alpha(m - 1));
        // alpha = h^-2 h0^2 at every level
        CHECK(chain.alpha(m) == doctest::Approx(chain.h0 * chain.h0 / (chain.h(m) * chain.h(m))));
    }
    CHECK_THROWS_AS(LevelChain(5, 3), std::invalid_argument);
}

TEST_CASE("profile of a constant net is exponent zero") {
    const LevelChain chain(3, 8);
    const auto p = asymptotic_profile([](int) { return 5.0; }, chain);
    CHECK(p.exponent == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.coefficient == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(p.r_squared == 1.0);
    CHECK(!p.used_absolute_values);
}

TEST_CASE("profile of an exact power law") {
    const LevelChain chain(3, 8);
    const auto p = asymptotic_profile([&](int m) { return 1.0 / chain.h(m); }, chain);
    CHECK(p.exponent == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p.coefficient == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.rendered.render() == "1*a^1/2");
}

TEST_CASE("profile flags sign-changing nets and rejects short chains") {
    const LevelChain chain(3, 8);
    const auto p = asymptotic_profile([&](int m) { return (m % 2 == 0 ? -1.0 : 1.0) / chain.h(m); }, chain);
    CHECK(p.used_absolute_values);
    CHECK(p.exponent == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(asymptotic_profile([](int) { return 1.0; }, LevelChain(3, 4)), std::invalid_argument);
    CHECK_THROWS_AS(asymptotic_profile([](int) { return 0.0; }, chain), std::invalid_argument);
}

TEST_CASE("product nets add exponents") {
    const LevelChain chain(3, 8);
    const Net f = [&](int m) { return 2.0 / chain.h(m); };
    const Net g = [&](int m) { return 3.0 / (chain.h(m) * chain.h(m)); };
    const auto pf = asymptotic_profile(f, chain);
    const auto pg = asymptotic_profile(g, chain);
    const auto pfg = asymptotic_profile([&](int m) { return f(m) * g(m); }, chain);
    REQUIRE(pf.r_squared > 0.999);
    REQUIRE(pg.r_squared > 0.999);
    CHECK(pfg.exponent == doctest::Approx(pf.exponent + pg.exponent).epsilon(0.05));
}

TEST_CASE("numerosity") {
    const LevelChain chain(0, 12);
    CHECK(numerosity({1.0, 2.0, 3.0}, 2, chain) == 3);
    CHECK(numerosity({}, 4, chain) == 0);
    CHECK(numerosity_naturals(3, chain) == 64);

    oracles::Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const int n = rng.uniform_int(0, 20);
        std::vector<double> xs;
        for (int k = 0; k < n; ++k) xs.push_back(rng.uniform(-50.0, 50.0));
        // distinct with probability 1; level 6 covers naturals up to 4096
        CHECK(numerosity(xs, 6, chain) == static_cast<std::int64_t>(xs.size()));
    }
    // duplicates collapse, and naturals beyond the section are not yet counted
    CHECK(numerosity({2.0, 2.0, 0.5}, 4, chain) == 2);
    CHECK(numerosity({3.0, 17.0}, 1, chain) == 1);   // 17 > 4^1
    CHECK(numerosity({3.0, 17.0}, 3, chain) == 2);
}

TEST_CASE("standard limit check") {
    const LevelChain chain(2, 9);
    const auto lim = standard_limit_check(
        [](int m) { return 3.0 + std::ldexp(1.0, -m); }, chain, 1e-2);
    REQUIRE(lim.has_value());
    CHECK(*lim == doctest::Approx(3.0).epsilon(1e-10));

    CHECK(!standard_limit_check([](int m) { return std::ldexp(1.0, 2 * m); }, chain, 1e-2).has_value());
}

TEST_CASE("limit check agrees with the rendered profile on convergent nets") {
    const LevelChain chain(5, 9);
    const Net net = [](int m) { return 3.0 + std::ldexp(1.0, -2 * m); };
    const auto lim = standard_limit_check(net, chain, 1e-2);
    REQUIRE(lim.has_value());
    const auto p = asymptotic_profile(net, chain);
    REQUIRE(std::abs(p.exponent) < 0.05);  // exponent-zero regime
    CHECK(std::abs(p.rendered.standard_part() - *lim) <= 1e-2);
}

TEST_CASE("trapezoid net of the Gaussian converges to the quadrature oracle") {
    const LevelChain chain(1, 6);
    const Net net = [&](int m) {
        const GridPtr g = build_grid(chain, m, {-4.0, 4.0}, 0.0);
        return pointwise_integral(embed_continuous_real(g, [](double x) { return std::exp(-x * x); }))
            .real();
    };
    const auto lim = standard_limit_check(net, chain, 1e-4);
    REQUIRE(lim.has_value());
    const double oracle = oracles::romberg([](double x) { return std::exp(-x * x); }, -4.0, 4.0);
    CHECK(oracle == doctest::Approx(oracles::kGaussIntegralMinus4To4).epsilon(1e-12));
    CHECK(*lim == doctest::Approx(oracle).epsilon(1e-4));
    CHECK(std::abs(*lim - 1.7724539) < 1e-4);
}
