#include "ultralab/observable.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ultralab/io.hpp"

namespace ultralab {

namespace {

Eigen::MatrixXd matmul(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    const auto n = static_cast<blasint>(A.rows()), k = static_cast<blasint>(A.cols()),
               m = static_cast<blasint>(B.cols());
    Eigen::MatrixXd C(n, m);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, m, k, 1.0, A.data(), n, B.data(),
                k, 0.0, C.data(), n);
    return C;
}

Eigen::MatrixXcd matmul(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    const auto n = static_cast<blasint>(A.rows()), k = static_cast<blasint>(A.cols()),
               m = static_cast<blasint>(B.cols());
    Eigen::MatrixXcd C(n, m);
    const Complex one(1.0, 0.0), zero(0.0, 0.0);
    cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, m, k, &one, A.data(), n, B.data(),
                k, &zero, C.data(), n);
    return C;
}

} // namespace

Observable::Observable(GridPtr grid, Eigen::MatrixXcd mat)
    : grid_(std::move(grid)), mat_(std::move(mat)) {
    if (!grid_) throw std::invalid_argument("Observable: null grid");
    const auto n = static_cast<Eigen::Index>(grid_->dim());
    if (mat_.rows() != n || mat_.cols() != n)
        throw std::invalid_argument("Observable: matrix does not match grid dimension");

    const auto d = grid_->weights();
    double defect = 0.0, scale = 0.0, max_imag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Complex wa = d[static_cast<std::size_t>(i)] * mat_(i, j);
            const Complex wa_t = d[static_cast<std::size_t>(j)] * mat_(j, i);
            defect = std::max(defect, std::abs(wa - std::conj(wa_t)));
            scale = std::max(scale, std::abs(wa));
            max_imag = std::max(max_imag, std::abs(mat_(i, j).imag()));
        }
    }
    hermitian_defect_ = defect;
    scale_ = scale;
    is_real_ = max_imag == 0.0;
}

double Observable::hermitian_defect_relative() const {
    return scale_ > 0.0 ? hermitian_defect_ / scale_ : 0.0;
}

Ultrafunction Observable::apply(const Ultrafunction& u) const {
    if (u.grid().get() != grid_.get()) throw std::invalid_argument("Observable::apply: grid mismatch");
    return Ultrafunction(grid_, mat_ * u.values());
}

Observable position_operator(GridPtr grid) {
    const auto n = static_cast<Eigen::Index>(grid->dim());
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) A(i, i) = grid->node(static_cast<std::size_t>(i));
    return Observable(std::move(grid), std::move(A));
}

Observable momentum_operator(const DerivativeOperator& D) {
    return Observable(D.grid(), Complex(0.0, -1.0) * D.matrix());
}

namespace {

Eigen::VectorXd potential_values(const GridPtr& grid, const PotentialSpec& potential) {
    const auto n = static_cast<Eigen::Index>(grid->dim());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    const double a_m = level_alpha(grid->level());

    std::visit(
        [&](const auto& pot) {
            using T = std::decay_t<decltype(pot)>;
            if constexpr (std::is_same_v<T, ZeroPotential>) {
            } else if constexpr (std::is_same_v<T, SampledPotential>) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double y = pot.f(grid->node(static_cast<std::size_t>(i)));
                    v[i] = std::isfinite(y) ? y : 0.0;
                }
            } else if constexpr (std::is_same_v<T, DeltaBump>) {
                const auto idx = grid->find_node(pot.node);
                if (!idx) throw std::invalid_argument("hamiltonian: delta bump point is not a node");
                v[static_cast<Eigen::Index>(*idx)] += pot.strength / grid->weight(*idx);
            } else if constexpr (std::is_same_v<T, IndicatorPenalty>) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double x = grid->node(static_cast<std::size_t>(i));
                    if (x >= pot.box.lo && x <= pot.box.hi) v[i] += a_m;
                }
            } else if constexpr (std::is_same_v<T, DirichletBox>) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double x = grid->node(static_cast<std::size_t>(i));
                    if (x <= pot.box.lo || x >= pot.box.hi) v[i] += a_m;
                }
            }
        },
        potential);
    return v;
}

} // namespace

Observable hamiltonian(const DerivativeOperator& D, const PotentialSpec& potential) {
    const GridPtr& grid = D.grid();
    Eigen::MatrixXd H = matmul(D.matrix(), D.matrix());
    H *= -0.5;
    const Eigen::VectorXd v = potential_values(grid, potential);
    for (Eigen::Index i = 0; i < H.rows(); ++i) H(i, i) += v[i];
    return Observable(grid, H.cast<Complex>());
}

Observable neumann_hamiltonian(const DerivativeOperator& D, const GridPtr& grid, Interval box) {
    if (grid.get() != D.grid().get())
        throw std::invalid_argument("neumann_hamiltonian: grid mismatch");
    if (!grid->find_node(box.lo) || !grid->find_node(box.hi))
        throw std::invalid_argument("neumann_hamiltonian: box endpoints must be grid nodes");

    Eigen::MatrixXd MD = D.matrix();
    for (Eigen::Index i = 0; i < MD.rows(); ++i) {
        const double x = grid->node(static_cast<std::size_t>(i));
        if (x < box.lo || x > box.hi) MD.row(i).setZero();
    }
    Eigen::MatrixXd H = matmul(D.matrix(), MD);
    H *= -0.5;
    return Observable(grid, H.cast<Complex>());
}

Observable commutator(const Observable& A, const Observable& B) {
    if (A.grid().get() != B.grid().get()) throw std::invalid_argument("commutator: grid mismatch");
    Eigen::MatrixXcd C = matmul(A.matrix(), B.matrix()) - matmul(B.matrix(), A.matrix());
    return Observable(A.grid(), std::move(C));
}

Complex expectation(const Observable& A, const Ultrafunction& psi) {
    if (psi.grid().get() != A.grid().get()) throw std::invalid_argument("expectation: grid mismatch");
    return inner_product(A.apply(psi), psi);
}

namespace {

std::vector<std::vector<std::size_t>> group_by_gap(const Eigen::VectorXd& mu, double tau) {
    std::vector<std::vector<std::size_t>> groups;
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
        if (j == 0 || mu[j] - mu[j - 1] > tau) groups.emplace_back();
        groups.back().push_back(static_cast<std::size_t>(j));
    }
    return groups;
}

} // namespace

Ultrafunction SpectrumResult::eigenvector(std::size_t j) const {
    return Ultrafunction(grid, eigenvectors.col(static_cast<Eigen::Index>(j)));
}

double SpectrumResult::group_value(std::size_t g) const {
    double s = 0.0;
    for (std::size_t j : st_groups[g]) s += eigenvalues[static_cast<Eigen::Index>(j)];
    return s / static_cast<double>(st_groups[g].size());
}

std::size_t SpectrumResult::group_of(std::size_t j) const {
    for (std::size_t g = 0; g < st_groups.size(); ++g)
        for (std::size_t k : st_groups[g])
            if (k == j) return g;
    throw std::out_of_range("SpectrumResult::group_of");
}

SpectrumResult spectrum(const Observable& A, const SpectrumOptions& opts) {
    if (A.hermitian_defect_relative() > opts.hermitian_tol_rel)
        throw std::invalid_argument("spectrum: operator is not weighted-Hermitian within tolerance");

    const GridPtr& grid = A.grid();
    const auto n = static_cast<Eigen::Index>(A.dim());
    const auto d = grid->weights();
    Eigen::VectorXd sqrt_d(n), inv_sqrt_d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sqrt_d[i] = std::sqrt(d[static_cast<std::size_t>(i)]);
        inv_sqrt_d[i] = 1.0 / sqrt_d[i];
    }

    SpectrumResult out;
    out.grid = grid;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);

    // Similarity transform S = W^(1/2) A W^(-1/2) is Hermitian; solve there,
    // then W^(-1/2) carries the eigenvectors back, orthonormal in the
    // weighted product by construction.
    if (A.is_real()) {
        Eigen::MatrixXd S(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                S(i, j) = i == j ? A.matrix()(i, i).real()
                                 : sqrt_d[i] * A.matrix()(i, j).real() * inv_sqrt_d[j];
        S = 0.5 * (S + S.transpose()).eval();
        const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L',
                                               static_cast<lapack_int>(n), S.data(),
                                               static_cast<lapack_int>(n), out.eigenvalues.data());
        if (info != 0) throw std::runtime_error("spectrum: dsyevd failed");
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                out.eigenvectors(i, j) = Complex(S(i, j) * inv_sqrt_d[i], 0.0);
    } else {
        Eigen::MatrixXcd S(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                S(i, j) = i == j ? A.matrix()(i, i)
                                 : sqrt_d[i] * A.matrix()(i, j) * inv_sqrt_d[j];
        S = (0.5 * (S + S.adjoint())).eval();
        const lapack_int info = LAPACKE_zheevd(
            LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
            reinterpret_cast<lapack_complex_double*>(S.data()), static_cast<lapack_int>(n),
            out.eigenvalues.data());
        if (info != 0) throw std::runtime_error("spectrum: zheevd failed");
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) out.eigenvectors(i, j) = S(i, j) * inv_sqrt_d[i];
    }

    // Renormalize in the weighted norm (unit up to roundoff already).
    for (Eigen::Index j = 0; j < n; ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            s += std::norm(out.eigenvectors(i, j)) * d[static_cast<std::size_t>(i)];
        out.eigenvectors.col(j) /= std::sqrt(s);
    }

    out.spectral_radius =
        std::max(std::abs(out.eigenvalues[0]), std::abs(out.eigenvalues[n - 1]));
    out.st_tol = opts.st_tol_abs.value_or(opts.st_tol_rel * out.spectral_radius);
    out.st_groups = group_by_gap(out.eigenvalues, out.st_tol);

    // Eigen-residuals, weighted per column.
    Eigen::MatrixXcd R = matmul(A.matrix(), out.eigenvectors);
    out.residuals.resize(n);
    double max_resid = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            s += std::norm(R(i, j) - out.eigenvalues[j] * out.eigenvectors(i, j)) *
                 d[static_cast<std::size_t>(i)];
        out.residuals[j] = std::sqrt(s);
        max_resid = std::max(max_resid, out.residuals[j]);
    }
    R.resize(0, 0);
    if (max_resid > opts.residual_tol_rel * std::max(out.spectral_radius, 1e-300))
        throw std::runtime_error("spectrum: eigen-residual exceeds tolerance");

    // Orthonormality in the weighted product: full Gram for moderate sizes,
    // diagonal plus a deterministic off-diagonal sample for large ones.
    double ortho = 0.0;
    if (n <= 1400) {
        Eigen::MatrixXcd WV = out.eigenvectors;
        for (Eigen::Index i = 0; i < n; ++i) WV.row(i) *= d[static_cast<std::size_t>(i)];
        Eigen::MatrixXcd G = matmul(Eigen::MatrixXcd(out.eigenvectors.adjoint()), WV);
        for (Eigen::Index j = 0; j < n; ++j) G(j, j) -= 1.0;
        ortho = G.cwiseAbs().maxCoeff();
    } else {
        auto pair_dot = [&](Eigen::Index a, Eigen::Index b) {
            Complex s = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                s += out.eigenvectors(i, a) * std::conj(out.eigenvectors(i, b)) *
                     d[static_cast<std::size_t>(i)];
            return s;
        };
        std::uint64_t state = 0x2545f4914f6cdd1dull;
        for (Eigen::Index j = 0; j < n; ++j)
            ortho = std::max(ortho, std::abs(pair_dot(j, j) - 1.0));
        for (int k = 0; k < 4 * n; ++k) {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            const auto a = static_cast<Eigen::Index>(state % static_cast<std::uint64_t>(n));
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            const auto b = static_cast<Eigen::Index>(state % static_cast<std::uint64_t>(n));
            if (a != b) ortho = std::max(ortho, std::abs(pair_dot(a, b)));
        }
    }
    out.orthonormality_defect = ortho;
    if (ortho > opts.orthonormality_tol)
        throw std::runtime_error("spectrum: eigenvector orthonormality defect exceeds tolerance");

    return out;
}

void write_csv(std::ostream& os, const SpectrumResult& s) {
    os << "j,mu,st_group,residual\n";
    for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) {
        os << j << ',' << fmt_g17(s.eigenvalues[j]) << ','
           << s.group_of(static_cast<std::size_t>(j)) << ',' << fmt_g17(s.residuals[j]) << '\n';
    }
}

MeasurementDistribution measure(const Ultrafunction& psi, const Observable& A,
                                const SpectrumOptions& opts) {
    return measure(psi, spectrum(A, opts));
}

MeasurementDistribution measure(const Ultrafunction& psi, const SpectrumResult& spec) {
    if (psi.grid().get() != spec.grid.get()) throw std::invalid_argument("measure: grid mismatch");
    if (std::abs(norm(psi) - 1.0) > 1e-8)
        throw std::invalid_argument("measure: state is not a unit ultrafunction");

    const auto n = static_cast<Eigen::Index>(psi.dim());
    const auto d = spec.grid->weights();
    MeasurementDistribution dist;
    dist.per_eigenvector.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex c = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            c += psi[static_cast<std::size_t>(i)] * std::conj(spec.eigenvectors(i, j)) *
                 d[static_cast<std::size_t>(i)];
        dist.per_eigenvector[static_cast<std::size_t>(j)] = std::norm(c);
    }

    for (std::size_t g = 0; g < spec.st_groups.size(); ++g) {
        MeasurementOutcome o;
        o.value = spec.group_value(g);
        o.group_size = spec.st_groups[g].size();
        double best = -1.0;
        for (std::size_t j : spec.st_groups[g]) {
            o.probability += dist.per_eigenvector[j];
            if (dist.per_eigenvector[j] > best) {
                best = dist.per_eigenvector[j];
                o.post_state = j;
            }
        }
        dist.total += o.probability;
        dist.outcomes.push_back(o);
    }
    return dist;
}

void write_json(std::ostream& os, const MeasurementDistribution& dist) {
    os << "[\n";
    for (std::size_t i = 0; i < dist.outcomes.size(); ++i) {
        const auto& o = dist.outcomes[i];
        os << "  {\"outcome\": " << fmt_g17(o.value) << ", \"probability\": " << fmt_g17(o.probability)
           << ", \"group_size\": " << o.group_size << "}"
           << (i + 1 < dist.outcomes.size() ? "," : "") << "\n";
    }
    os << "]\n";
}

StateClassification classify_state(const LevelChain& chain,
                                   const std::function<LevelSample(int)>& builder) {
    if (chain.size() < 3) throw std::invalid_argument("classify_state: need at least 3 levels");
    std::vector<double> energy(static_cast<std::size_t>(chain.size()));
    for (int m = chain.m_min; m <= chain.m_max; ++m) {
        const LevelSample sample = builder(m);
        const double n2 = std::pow(norm(sample.state), 2);
        if (!(n2 > 0.0)) throw std::invalid_argument("classify_state: zero state");
        energy[static_cast<std::size_t>(m - chain.m_min)] =
            expectation(sample.hamiltonian, sample.state).real() / n2;
    }
    const AsymptoticProfile p = asymptotic_profile(
        [&](int m) { return energy[static_cast<std::size_t>(m - chain.m_min)]; }, chain);

    StateClassification c;
    c.exponent = p.exponent;
    c.fit_quality = p.r_squared;
    c.kind = p.exponent <= 0.25 ? StateKind::physical : StateKind::ideal;
    return c;
}

} // namespace ultralab
