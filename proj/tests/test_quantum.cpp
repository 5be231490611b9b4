#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <sstream>

#include "support/oracles.hpp"
#include "ultralab/observable.hpp"

using namespace ultralab;

namespace {

const LevelChain chain(0, 12);

struct Lab {
    GridPtr grid;
    DerivativeOperator D;
    explicit Lab(int m, Interval dom = {0.0, 1.0}, double pad = 0.5)
        : grid(build_grid(chain, m, dom, pad)), D(build_derivative(grid, 2, 1)) {}
};

Ultrafunction unit_gaussian(const GridPtr& g, double center = 0.5, double sigma = 0.2) {
    return normalized(embed_continuous_real(g, [=](double x) {
        return std::exp(-(x - center) * (x - center) / (4.0 * sigma * sigma));
    }));
}

} // namespace

TEST_CASE("position operator") {
    const Lab lab(6);
    const Observable Q = position_operator(lab.grid);
    CHECK(Q.hermitian_defect() == 0.0);

    // Q delta_q = q delta_q exactly
    for (double q : {0.25, 0.5, 1.0}) {
        const Ultrafunction d = delta(lab.grid, q);
        const Ultrafunction Qd = Q.apply(d);
        for (std::size_t i = 0; i < d.dim(); ++i) CHECK(Qd[i] == q * d[i]);
    }

    // the spectrum is the node set and the eigenvectors are the delta basis
    const SpectrumResult s = spectrum(Q);
    REQUIRE(s.eigenvalues.size() == static_cast<Eigen::Index>(lab.grid->dim()));
    for (std::size_t j = 0; j < lab.grid->dim(); ++j) {
        CHECK(s.eigenvalues[static_cast<Eigen::Index>(j)] == lab.grid->node(j));
        const Ultrafunction e = normalized_delta(lab.grid, lab.grid->node(j));
        const Complex overlap = inner_product(s.eigenvector(j), e);
        CHECK(std::abs(std::abs(overlap) - 1.0) <= 1e-12);
    }

    // delta eigenvectors regardless of weight scale: required points skew the
    // weights without disturbing the eigenbasis
    const GridPtr skew =
        build_grid(chain, 5, {0.0, 1.0}, 0.5, std::vector<double>{0.1234567, 0.7654321});
    const SpectrumResult s2 = spectrum(position_operator(skew));
    for (std::size_t j = 0; j < skew->dim(); j += 5) {
        const Complex overlap =
            inner_product(s2.eigenvector(j), normalized_delta(skew, skew->node(j)));
        CHECK(std::abs(std::abs(overlap) - 1.0) <= 1e-12);
    }
}

TEST_CASE("momentum operator") {
    const Lab lab(6);
    const Observable P = momentum_operator(lab.D);
    const double h = lab.grid->spacing();
    CHECK(P.hermitian_defect() <= 1e-14 / h);

    const SpectrumResult s = spectrum(P);
    double gap = 1e300;
    for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j)
        gap = std::min(gap, std::abs(s.eigenvalues[j]));
    CHECK(gap > 0.0);
    CHECK(gap >= lab.D.sigma_min() * 0.999);
}

TEST_CASE("hamiltonian potentials") {
    const Lab lab(6);

    // delta bump lands k/d(a) on the diagonal
    const double k = 2.5, a = 0.5;
    const Observable Hb = hamiltonian(lab.D, DeltaBump{k, a});
    const Observable H0 = hamiltonian(lab.D, ZeroPotential{});
    const auto idx = static_cast<Eigen::Index>(*lab.grid->find_node(a));
    const Complex diag_diff = Hb.matrix()(idx, idx) - H0.matrix()(idx, idx);
    CHECK(diag_diff.real() ==
          doctest::Approx(k / lab.grid->weight(static_cast<std::size_t>(idx))).epsilon(1e-14));
    CHECK_THROWS_AS(hamiltonian(lab.D, DeltaBump{1.0, 0.1234567}), std::invalid_argument);

    // free Hamiltonian is weighted-Hermitian and positive
    CHECK(H0.hermitian_defect_relative() <= 1e-12);
    oracles::Rng rng(31);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(lab.grid->dim()));
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        const Ultrafunction u(lab.grid, v);
        const Complex e = expectation(H0, u);
        CHECK(e.real() >= -1e-10);
        CHECK(std::abs(e.imag()) <= 1e-10 * (1.0 + std::abs(e.real())));
    }
}

TEST_CASE("spectrum invariants") {
    const Lab lab(6);
    const Observable H = hamiltonian(lab.D, SampledPotential{[](double x) { return 0.5 * x * x; }});
    const SpectrumResult s = spectrum(H);

    CHECK(s.eigenvalues.size() == static_cast<Eigen::Index>(lab.grid->dim()));
    for (Eigen::Index j = 1; j < s.eigenvalues.size(); ++j)
        CHECK(s.eigenvalues[j] >= s.eigenvalues[j - 1]);
    CHECK(s.residuals.maxCoeff() <= 1e-9 * s.spectral_radius);
    CHECK(s.orthonormality_defect <= 1e-10);

    // completeness: Parseval over the eigenbasis
    oracles::Rng rng(41);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(lab.grid->dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const Ultrafunction u(lab.grid, v);
    double sum = 0.0;
    for (std::size_t j = 0; j < lab.grid->dim(); ++j)
        sum += std::norm(inner_product(u, s.eigenvector(j)));
    CHECK(sum == doctest::Approx(norm(u) * norm(u)).epsilon(1e-10));

    // serialization shape
    std::ostringstream os;
    write_csv(os, s);
    CHECK(os.str().rfind("j,mu,st_group,residual\n", 0) == 0);

    // a commutator is not weighted-Hermitian; spectrum refuses it
    const Observable C = commutator(position_operator(lab.grid), momentum_operator(lab.D));
    CHECK_THROWS_AS(spectrum(C), std::invalid_argument);
}

TEST_CASE("measurement") {
    const Lab lab(6);
    const Observable H = hamiltonian(lab.D, DirichletBox{{0.0, 1.0}});
    const SpectrumResult s = spectrum(H);

    // an eigenstate measures deterministically within its group
    const Ultrafunction psi3 = s.eigenvector(3);
    const MeasurementDistribution md = measure(psi3, s);
    double found = 0.0;
    for (const auto& o : md.outcomes) {
        if (o.probability > 0.5) {
            found = o.probability;
            CHECK(o.value == doctest::Approx(s.eigenvalues[3]).epsilon(s.st_tol + 1e-9));
        }
    }
    CHECK(found == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(md.total == doctest::Approx(1.0).epsilon(1e-10));

    // probabilities of a generic unit state sum to one
    const MeasurementDistribution md2 = measure(unit_gaussian(lab.grid), s);
    CHECK(md2.total == doctest::Approx(1.0).epsilon(1e-10));
    for (const auto& o : md2.outcomes) CHECK(o.probability >= 0.0);

    // non-unit states are refused
    CHECK_THROWS_AS(measure(delta(lab.grid, 0.5), s), std::invalid_argument);

    // position measurement: p(q) = |psi(q)|^2 d(q)
    const Ultrafunction psi = unit_gaussian(lab.grid);
    const MeasurementDistribution mp = measure(psi, position_operator(lab.grid));
    REQUIRE(mp.per_eigenvector.size() == lab.grid->dim());
    for (std::size_t q = 0; q < lab.grid->dim(); ++q) {
        const double expected = std::norm(psi[q]) * lab.grid->weight(q);
        CHECK(mp.per_eigenvector[q] == doctest::Approx(expected).epsilon(1e-12));
    }

    // JSON shape
    std::ostringstream os;
    write_json(os, md2);
    CHECK(os.str().rfind("[", 0) == 0);
    CHECK(os.str().find("\"outcome\"") != std::string::npos);
    CHECK(os.str().find("\"group_size\"") != std::string::npos);
}

TEST_CASE("commutator identities") {
    for (int m : {6, 8}) {
        const Lab lab(m);
        const Observable Q = position_operator(lab.grid);
        const Observable P = momentum_operator(lab.D);
        const double h = lab.grid->spacing();

        // [P,Q] vanishes on the delta state
        const Observable PQ = commutator(P, Q);
        const Ultrafunction da = delta(lab.grid, 0.5);
        CHECK(std::abs(inner_product(PQ.apply(da), da)) <= 1e-10 / h);

        // [Q,Q] = 0 exactly
        const Observable QQ = commutator(Q, Q);
        CHECK(QQ.matrix().cwiseAbs().maxCoeff() == 0.0);

        // [Q,P] acts as +i on smooth states, to the discretization order;
        // oracle: D(x u) - x D u against u
        const Ultrafunction psi = unit_gaussian(lab.grid);
        const Observable QP = commutator(Q, P);
        const Complex val = inner_product(QP.apply(psi), psi);
        Eigen::VectorXcd xu(psi.values());
        for (std::size_t i = 0; i < psi.dim(); ++i)
            xu[static_cast<Eigen::Index>(i)] *= lab.grid->node(i);
        Ultrafunction r(lab.grid, lab.D.matrix() * xu);
        for (std::size_t i = 0; i < psi.dim(); ++i)
            r.values()[static_cast<Eigen::Index>(i)] -=
                lab.grid->node(i) * lab.D.apply(psi)[i];
        const Complex oracle = inner_product(r, psi) * Complex(0.0, 1.0);
        CHECK(std::abs(val - oracle) <= 1e-10);
        CHECK(std::abs(val - Complex(0.0, 1.0)) <= 0.02);
        CHECK(std::abs(val - Complex(0.0, 1.0)) <= 8.0 * h * h);
    }
}

TEST_CASE("dirichlet box at level 8") {
    const Lab lab(8);
    const Observable H = hamiltonian(lab.D, DirichletBox{{0.0, 1.0}});
    SpectrumOptions opts;
    opts.st_tol_abs = 2.0;  // merge sawtooth twins into one outcome
    const SpectrumResult s = spectrum(H, opts);
    CHECK(s.group_value(0) == doctest::Approx(oracles::kPiSqHalf).epsilon(0.02));
    // first three outcome eigenspaces carry the sine modes
    for (int n = 1; n <= 3; ++n) {
        const Ultrafunction f = embed_continuous_real(lab.grid, [n](double x) {
            return x < 0.0 || x > 1.0 ? 0.0 : std::sin(n * M_PI * x);
        });
        Ultrafunction proj = Ultrafunction::zero(lab.grid);
        for (std::size_t j : s.st_groups[static_cast<std::size_t>(n - 1)]) {
            const Ultrafunction v = s.eigenvector(j);
            proj = proj + v * inner_product(f, v);
        }
        CHECK(norm(proj - f) / norm(f) <= 0.02);
    }
}

TEST_CASE("weighted self-adjointness of constructed observables") {
    const Lab lab(6);
    oracles::Rng rng(55);
    const std::vector<Observable> obs = {
        position_operator(lab.grid),
        momentum_operator(lab.D),
        hamiltonian(lab.D, SampledPotential{[](double x) { return std::cos(3.0 * x); }}),
        hamiltonian(lab.D, DirichletBox{{0.0, 1.0}}),
        neumann_hamiltonian(lab.D, lab.grid, {0.0, 1.0}),
    };
    for (const Observable& A : obs) {
        double scale = A.matrix().cwiseAbs().maxCoeff();
        for (int rep = 0; rep < 5; ++rep) {
            Eigen::VectorXcd a(static_cast<Eigen::Index>(lab.grid->dim())), b(a.size());
            for (Eigen::Index i = 0; i < a.size(); ++i) {
                a[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
                b[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            }
            const Ultrafunction u(lab.grid, a), v(lab.grid, b);
            const Complex lhs = inner_product(A.apply(u), v);
            const Complex rhs = inner_product(u, A.apply(v));
            CHECK(std::abs(lhs - rhs) <= 1e-11 * scale);
        }
    }
}

TEST_CASE("expectation") {
    const Lab lab(6);
    const Observable Q = position_operator(lab.grid);
    const Observable H0 = hamiltonian(lab.D, ZeroPotential{});

    // diagonal observable on a normalized delta gives the node value
    const Ultrafunction e = normalized_delta(lab.grid, 0.25);
    CHECK(expectation(Q, e).real() == doctest::Approx(0.25).epsilon(1e-13));

    // linearity
    const Ultrafunction psi = unit_gaussian(lab.grid);
    const Complex sum = expectation(Q, psi) + expectation(H0, psi);
    Observable QplusH(lab.grid, Q.matrix() + H0.matrix());
    CHECK(std::abs(expectation(QplusH, psi) - sum) <= 1e-11);

    // free energy of the unit Gaussian tracks the continuum value 1/(8 sigma^2)
    // and stays level-stable
    std::vector<double> es;
    for (int m = 6; m <= 9; ++m) {
        const Lab l2(m);
        es.push_back(expectation(hamiltonian(l2.D, ZeroPotential{}), unit_gaussian(l2.grid)).real());
    }
    const double oracle = 1.0 / (8.0 * 0.2 * 0.2);
    for (double v : es) {
        CHECK(v > 0.0);
        CHECK(v == doctest::Approx(oracle).epsilon(0.01));
    }
    const auto [mn, mx] = std::minmax_element(es.begin(), es.end());
    CHECK((*mx - *mn) / *mn <= 0.05);
}

TEST_CASE("classify_state") {
    const LevelChain scan(5, 9);

    const auto gaussian_family = [&](int m) {
        const Lab lab(m);
        return LevelSample{hamiltonian(lab.D, ZeroPotential{}), unit_gaussian(lab.grid)};
    };
    const StateClassification g = classify_state(scan, gaussian_family);
    CHECK(g.kind == StateKind::physical);
    CHECK(std::abs(g.exponent) <= 0.25);

    const auto delta_family = [&](int m) {
        const Lab lab(m);
        return LevelSample{hamiltonian(lab.D, ZeroPotential{}), normalized_delta(lab.grid, 0.5)};
    };
    const StateClassification d = classify_state(scan, delta_family);
    CHECK(d.kind == StateKind::ideal);
    CHECK(d.exponent == doctest::Approx(2.0).epsilon(0.1));

    const auto bump_family = [&](int m) {
        const Lab lab(m, {-1.0, 1.0});
        const Ultrafunction psi = normalized(embed_continuous_real(lab.grid, [](double x) {
            return std::pow(std::abs(x), -0.25) * std::exp(-x * x / 0.125);
        }));
        return LevelSample{hamiltonian(lab.D, ZeroPotential{}), psi};
    };
    const StateClassification b = classify_state(scan, bump_family);
    CHECK(b.kind == StateKind::ideal);
    CHECK(b.exponent > 0.25);
}

TEST_CASE("poincare ratio diverges at first order") {
    const LevelChain scan(4, 9);
    const auto p = asymptotic_profile(
        [&](int m) {
            const Lab lab(m);
            const Ultrafunction d = delta(lab.grid, 0.5);
            return norm(lab.D.apply(d)) / norm(d);
        },
        scan);
    CHECK(p.exponent == doctest::Approx(1.0).epsilon(0.1));
    CHECK(p.r_squared > 0.999);
}

TEST_CASE("penalty confinement follows the boundary-layer rate") {
    // outside amplitude of the ground group scales with h (the layer width),
    // roughly halving per level
    double prev = -1.0;
    for (int m : {6, 7, 8}) {
        const Lab lab(m);
        const Observable H = hamiltonian(lab.D, DirichletBox{{0.0, 1.0}});
        const SpectrumResult s = spectrum(H);
        double maxout = 0.0;
        for (std::size_t j : s.st_groups[0]) {
            const Ultrafunction v = s.eigenvector(j);
            for (std::size_t i = 0; i < v.dim(); ++i) {
                const double x = lab.grid->node(i);
                if (x < 0.0 || x > 1.0) maxout = std::max(maxout, std::abs(v[i]));
            }
        }
        CHECK(maxout <= 2.0 * lab.grid->spacing());
        if (prev > 0.0) {
            CHECK(maxout < 0.65 * prev);
            CHECK(maxout > 0.35 * prev);
        }
        prev = maxout;
    }
}

TEST_CASE("indicator penalty expels states from the box") {
    const Lab lab(6);
    const Observable H = hamiltonian(lab.D, IndicatorPenalty{{0.0, 1.0}});
    const SpectrumResult s = spectrum(H);
    // ground modes live in the padding, not in the penalized box
    const Ultrafunction v = s.eigenvector(0);
    double inside = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < v.dim(); ++i) {
        const double x = lab.grid->node(i);
        if (x >= 0.0 && x <= 1.0)
            inside = std::max(inside, std::abs(v[i]));
        else
            outside = std::max(outside, std::abs(v[i]));
    }
    CHECK(outside > 10.0 * inside);
}
