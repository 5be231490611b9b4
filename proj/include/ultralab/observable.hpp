#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "ultralab/derivative.hpp"

namespace ultralab {

/// An operator on one level's function space, weighted-Hermitian for genuine
/// observables. The Hermitian defect (max |WA - (WA)*|) is measured at
/// construction and enforced where a spectrum is requested, so commutators
/// (weighted-anti-Hermitian) remain representable.
class Observable {
public:
    Observable(GridPtr grid, Eigen::MatrixXcd mat);

    const GridPtr& grid() const { return grid_; }
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
    double hermitian_defect() const { return hermitian_defect_; }
    double hermitian_defect_relative() const;
    bool is_real() const { return is_real_; }

    Ultrafunction apply(const Ultrafunction& u) const;

private:
    GridPtr grid_;
    Eigen::MatrixXcd mat_;
    double hermitian_defect_ = 0.0;
    double scale_ = 0.0;
    bool is_real_ = false;
};

/// Multiplication by the coordinate; the delta basis diagonalizes it.
Observable position_operator(GridPtr grid);

/// -i D; weighted-Hermitian by the antisymmetry of W D, and 0 is not an
/// eigenvalue since D has a trivial kernel.
Observable momentum_operator(const DerivativeOperator& D);

struct ZeroPotential {};
struct SampledPotential { std::function<double(double)> f; };
struct DeltaBump { double strength = 1.0; double node = 0.0; };
/// Adds alpha(m) on the nodes of the box (an infinitely deep plateau there).
struct IndicatorPenalty { Interval box; };
/// Adds alpha(m) on every node outside the open box, pinning the boundary:
/// the penalty realization of absorbing walls at the box ends.
struct DirichletBox { Interval box; };

using PotentialSpec =
    std::variant<ZeroPotential, SampledPotential, DeltaBump, IndicatorPenalty, DirichletBox>;

/// -1/2 D^2 + diag(V). Any potential gives a weighted-Hermitian operator.
Observable hamiltonian(const DerivativeOperator& D, const PotentialSpec& potential);

/// -1/2 D M D with M the indicator of the closed box: the diffusion
/// coefficient vanishes outside, so nothing leaks (reflecting walls).
/// Box endpoints must be grid nodes.
Observable neumann_hamiltonian(const DerivativeOperator& D, const GridPtr& grid, Interval box);

Observable commutator(const Observable& A, const Observable& B);
Complex expectation(const Observable& A, const Ultrafunction& psi);

struct SpectrumOptions {
    double st_tol_rel = 1e-6;              // grouping tolerance, relative to the spectral radius
    std::optional<double> st_tol_abs;      // absolute override
    double hermitian_tol_rel = 1e-12;
    double residual_tol_rel = 1e-9;
    double orthonormality_tol = 1e-10;
};

/// Full eigendecomposition in the weighted product. Eigenvalues ascending,
/// eigenvectors weighted-orthonormal, indices grouped by standard-part
/// equality at the grouping tolerance.
struct SpectrumResult {
    GridPtr grid;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;                 // column j pairs with eigenvalues[j]
    std::vector<std::vector<std::size_t>> st_groups;
    Eigen::VectorXd residuals;                     // weighted 2-norm per eigenpair
    double orthonormality_defect = 0.0;
    double st_tol = 0.0;                           // absolute tolerance used
    double spectral_radius = 0.0;

    Ultrafunction eigenvector(std::size_t j) const;
    double group_value(std::size_t g) const;       // mean of the group's eigenvalues
    std::size_t group_of(std::size_t j) const;
};

SpectrumResult spectrum(const Observable& A, const SpectrumOptions& opts = {});

/// CSV with columns j,mu,st_group,residual.
void write_csv(std::ostream& os, const SpectrumResult& s);

/// One observable outcome: a standard-part group with its total transition
/// probability and the detected eigenstate (most probable in the group).
struct MeasurementOutcome {
    double value = 0.0;
    double probability = 0.0;
    std::size_t post_state = 0;
    std::size_t group_size = 0;
};

struct MeasurementDistribution {
    std::vector<MeasurementOutcome> outcomes;
    std::vector<double> per_eigenvector;  // |<psi, psi_j>|^2 in eigenvalue order
    double total = 0.0;
};

/// Born probabilities of a unit state against an observable's spectrum.
MeasurementDistribution measure(const Ultrafunction& psi, const Observable& A,
                                const SpectrumOptions& opts = {});
MeasurementDistribution measure(const Ultrafunction& psi, const SpectrumResult& spec);

/// JSON array of {outcome, probability, group_size}.
void write_json(std::ostream& os, const MeasurementDistribution& dist);

enum class StateKind { physical, ideal };

struct StateClassification {
    StateKind kind = StateKind::physical;
    double exponent = 0.0;
    double fit_quality = 0.0;
};

/// Energy of one state family across levels; builders return the level's
/// Hamiltonian and state (any norm; the energy is normalized internally).
struct LevelSample {
    Observable hamiltonian;
    Ultrafunction state;
};

/// Physical iff the fitted divergence exponent of the energy is <= 0.25.
StateClassification classify_state(const LevelChain& chain,
                                   const std::function<LevelSample(int)>& builder);

} // namespace ultralab
