#include "ultralab/derivative.hpp"

#include <lapacke.h>

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "ultralab/io.hpp"
#include "ultralab/quadrature.hpp"

namespace ultralab {

Eigen::VectorXd fd_weights(double x0, std::span<const double> nodes, int deriv_order) {
    const int n = static_cast<int>(nodes.size());
    const int k = deriv_order;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, k + 1);
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, k);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[static_cast<std::size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int v = mn; v >= 1; --v)
                    c(i, v) = c1 * (v * c(i - 1, v - 1) - c5 * c(i - 1, v)) / c2;
                c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
            }
            for (int v = mn; v >= 1; --v) c(j, v) = (c4 * c(j, v) - v * c(j, v - 1)) / c3;
            c(j, 0) = c4 * c(j, 0) / c3;
        }
        c1 = c2;
    }
    return c.col(k);
}

namespace {

/// Smallest singular value of a banded matrix by inverse iteration on A^T A,
/// with one banded LU factorization (deterministic start vector).
double banded_sigma_min(const Eigen::MatrixXd& A, int band) {
    const auto n = static_cast<lapack_int>(A.rows());
    const lapack_int kl = band, ku = band;
    const lapack_int ldab = 2 * kl + ku + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n), 0.0);
    // LAPACK band storage (column-major): AB(kl+ku+i-j, j) = A(i,j).
    for (lapack_int j = 0; j < n; ++j)
        for (lapack_int i = std::max<lapack_int>(0, j - ku); i <= std::min<lapack_int>(n - 1, j + kl); ++i)
            ab[static_cast<std::size_t>(j) * ldab + static_cast<std::size_t>(kl + ku + i - j)] = A(i, j);

    std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
    const lapack_int info =
        LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data());
    if (info != 0) return 0.0;  // numerically singular

    Eigen::VectorXd z(n);
    for (lapack_int i = 0; i < n; ++i) z[i] = 1.0 + 0.5 * std::sin(3.7 * static_cast<double>(i));
    z.normalize();

    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd y = z;
        // (A^T A)^-1 z  =  A^-1 (A^-T z)
        if (LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'T', n, kl, ku, 1, ab.data(), ldab, ipiv.data(),
                           y.data(), n) != 0)
            return 0.0;
        if (LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab.data(), ldab, ipiv.data(),
                           y.data(), n) != 0)
            return 0.0;
        const double next = y.norm();
        if (!(next > 0.0) || !std::isfinite(next)) return 0.0;
        z = y / next;
        if (it > 4 && std::abs(next - lambda) <= 1e-12 * next) { lambda = next; break; }
        lambda = next;
    }
    return 1.0 / std::sqrt(lambda);
}

/// C1 compactly supported test battery inside the physical domain.
std::vector<std::function<double(double)>> test_battery(const Interval& dom, bool derivative) {
    const double c = 0.5 * (dom.lo + dom.hi);
    const double s = 0.15 * (dom.hi - dom.lo);
    std::vector<std::function<double(double)>> fs;
    fs.push_back([=](double x) {
        const double t = (x - c) / s;
        return derivative ? -t / s * std::exp(-0.5 * t * t) : std::exp(-0.5 * t * t);
    });
    fs.push_back([=](double x) {
        const double t = (x - c) / s;
        const double g = std::exp(-0.5 * t * t);
        return derivative ? (2.0 * std::cos(2.0 * t) / s - std::sin(2.0 * t) * t / s) * g
                          : std::sin(2.0 * t) * g;
    });
    return fs;
}

} // namespace

Ultrafunction DerivativeOperator::apply(const Ultrafunction& u) const {
    if (u.grid().get() != grid_.get())
        throw std::invalid_argument("DerivativeOperator::apply: grid mismatch");
    return Ultrafunction(grid_, mat_ * u.values());
}

DerivativeOperator build_derivative(GridPtr grid, int p, int w) {
    if (p != 2 && p != 4) throw std::invalid_argument("build_derivative: order p must be 2 or 4");
    if (w < p / 2) throw std::invalid_argument("build_derivative: bandwidth w must be >= p/2");
    const std::size_t n = grid->dim();
    if (n % 2 == 1)
        throw std::invalid_argument(
            "build_derivative: odd dimension (a weighted-antisymmetric operator of odd "
            "dimension always has a kernel)");

    const auto x = grid->nodes();
    const auto d = grid->weights();

    Eigen::MatrixXd D0 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                               static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= static_cast<std::size_t>(w) ? i - static_cast<std::size_t>(w) : 0;
        const std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(w));
        const Eigen::VectorXd wts = fd_weights(x[i], x.subspan(lo, hi - lo + 1), 1);
        for (std::size_t j = lo; j <= hi; ++j)
            D0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                wts[static_cast<Eigen::Index>(j - lo)];
    }

    // Q = (W D0 - (W D0)^T)/2 is exactly antisymmetric as stored; D = W^-1 Q.
    Eigen::MatrixXd Q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                0.5 * (d[i] * D0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                       d[j] * D0(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));

    DerivativeOperator D;
    D.grid_ = grid;
    D.order_ = p;
    D.width_ = w;
    D.mat_ = Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) D.mat_.row(static_cast<Eigen::Index>(i)) = Q.row(static_cast<Eigen::Index>(i)) / d[i];

    int bw = 0;
    for (Eigen::Index i = 0; i < D.mat_.rows(); ++i)
        for (Eigen::Index j = 0; j < D.mat_.cols(); ++j)
            if (D.mat_(i, j) != 0.0) bw = std::max(bw, static_cast<int>(std::abs(i - j)));
    D.bandwidth_ = bw;
    if (bw > w + 1)
        throw std::runtime_error("build_derivative: locality violated (bandwidth > w + 1)");

    double defect = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < std::min(n, i + static_cast<std::size_t>(bw) + 1); ++j) {
            const double qij = d[i] * D.mat_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            const double qji = d[j] * D.mat_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            defect = std::max(defect, std::abs(qij + qji));
        }
    D.antisym_defect_ = defect;

    D.sigma_min_ = banded_sigma_min(D.mat_, bw);
    const double h = grid->spacing();
    if (!(D.sigma_min_ > 1e-8 / h))
        throw std::runtime_error(
            "build_derivative: kernel check failed (sigma_min <= 1e-8/h); try another (m, w)");

    // Max consistency error over the battery, scored w*h inside the padded edges.
    double cerr = 0.0;
    const auto fs = test_battery(grid->physical_domain(), false);
    const auto dfs = test_battery(grid->physical_domain(), true);
    for (std::size_t k = 0; k < fs.size(); ++k) {
        Eigen::VectorXd fv(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) fv[static_cast<Eigen::Index>(i)] = fs[k](x[i]);
        const Eigen::VectorXd Df = D.mat_ * fv;
        for (std::size_t i = static_cast<std::size_t>(w) + 1; i + static_cast<std::size_t>(w) + 1 < n; ++i)
            cerr = std::max(cerr, std::abs(Df[static_cast<Eigen::Index>(i)] - dfs[k](x[i])));
    }
    D.consistency_err_ = cerr;

    return D;
}

bool AxiomReport::all_pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

void write_json(std::ostream& os, const AxiomReport& report) {
    os << "{\n";
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        os << "  \"axiom" << (i + 1) << "\": {\"value\": " << fmt_g17(e.value)
           << ", \"threshold\": " << fmt_g17(e.threshold)
           << ", \"pass\": " << (e.pass ? "true" : "false") << "}"
           << (i + 1 < report.entries.size() ? "," : "") << "\n";
    }
    os << "}\n";
}

AxiomReport check_axioms(const GridPtr& grid, const DerivativeOperator& D,
                         const AxiomThresholds& thr) {
    AxiomReport rep;
    const std::size_t n = grid->dim();
    const double h = grid->spacing();

    // A1: nodal-basis representability. Random members are reproduced by
    // u = sum_a (integral of u * delta_a) chi_a with zero residual.
    {
        std::uint64_t state = 0x9e3779b97f4a7c15ull;
        auto rnd = [&state]() {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            return static_cast<double>(state % 2000001) * 1e-6 - 1.0;
        };
        double resid = 0.0;
        for (int rep_i = 0; rep_i < 3; ++rep_i) {
            Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = Complex(rnd(), rnd());
            const Ultrafunction u(grid, v);
            for (std::size_t a = 0; a < n; ++a) {
                const Ultrafunction da = delta(grid, grid->node(a));
                Complex coeff = 0.0;  // integral of u * delta_a, summed literally
                for (std::size_t i = 0; i < n; ++i) coeff += u[i] * da[i] * grid->weight(i);
                resid = std::max(resid, std::abs(coeff - u[a]));
            }
        }
        rep.entries[0] = {"representability", resid, thr.representability, resid <= thr.representability};
    }

    // A2: pointwise integral against quadrature on smooth compactly supported samples.
    {
        double worst = 0.0;
        for (const auto& f : test_battery(grid->physical_domain(), false)) {
            const auto dom = grid->padded_domain();
            const double oracle = adaptive_simpson(f, dom.lo, dom.hi, 1e-10);
            const Complex pi = pointwise_integral(embed_continuous_real(grid, f));
            worst = std::max(worst, std::abs(pi.real() - oracle));
        }
        rep.entries[1] = {"pointwise_integral", worst, thr.integral_vs_quadrature,
                          worst <= thr.integral_vs_quadrature};
    }

    // A3: strictly positive weights.
    {
        double wmin = grid->weight(0);
        for (std::size_t i = 1; i < n; ++i) wmin = std::min(wmin, grid->weight(i));
        rep.entries[2] = {"weight_positivity", wmin, 0.0, wmin > 0.0};
    }

    // A4: consistency with the classical derivative on the C1 battery.
    {
        const double bound = thr.consistency_constant * h * h;
        rep.entries[3] = {"consistency", D.consistency_error(), bound,
                          D.consistency_error() <= bound};
    }

    // A5: trivial kernel, scale-free as sigma_min * h.
    {
        rep.entries[4] = {"kernel", D.sigma_min() * h, thr.kernel_floor_scale,
                          D.sigma_min() * h > thr.kernel_floor_scale};
    }

    // A6: locality (column support within the stencil window).
    {
        rep.entries[5] = {"locality", static_cast<double>(D.bandwidth()),
                          static_cast<double>(D.half_width() + 1),
                          D.bandwidth() <= D.half_width() + 1};
    }

    // A7: exact integration by parts, no boundary terms.
    {
        const double bound = thr.antisymmetry_scale / h;
        rep.entries[6] = {"antisymmetry", D.antisymmetry_defect(), bound,
                          D.antisymmetry_defect() <= bound};
    }

    return rep;
}

} // namespace ultralab
