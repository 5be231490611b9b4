#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <span>
#include <string>

#include "ultralab/ultrafunction.hpp"

namespace ultralab {

/// Finite-difference weights for the k-th derivative at x0 from arbitrary
/// nodes (Fornberg's recurrences).
Eigen::VectorXd fd_weights(double x0, std::span<const double> nodes, int deriv_order);

/// One named axiom check: measured value, threshold, direction-resolved pass.
struct AxiomEntry {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct AxiomReport {
    std::array<AxiomEntry, 7> entries;
    bool all_pass() const;
};

/// JSON with keys axiom1..axiom7, each {value, threshold, pass}.
void write_json(std::ostream& os, const AxiomReport& report);

/// The generalized derivative at one level: a banded real operator that is
/// exactly antisymmetric in the weighted product (so integration by parts has
/// no boundary terms), local (bandwidth <= stencil half-width), consistent of
/// interior order 2w, and kernel-free (sigma_min > 0).
class DerivativeOperator {
public:
    const GridPtr& grid() const { return grid_; }
    const Eigen::MatrixXd& matrix() const { return mat_; }
    int order() const { return order_; }
    int half_width() const { return width_; }
    int bandwidth() const { return bandwidth_; }
    double sigma_min() const { return sigma_min_; }
    double antisymmetry_defect() const { return antisym_defect_; }
    double consistency_error() const { return consistency_err_; }

    Ultrafunction apply(const Ultrafunction& u) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return mat_ * v; }

    friend DerivativeOperator build_derivative(GridPtr grid, int p, int w);

private:
    DerivativeOperator() = default;

    GridPtr grid_;
    Eigen::MatrixXd mat_;
    int order_ = 2;
    int width_ = 1;
    int bandwidth_ = 0;
    double sigma_min_ = 0.0;
    double antisym_defect_ = 0.0;
    double consistency_err_ = 0.0;
};

/// Construction: per-row difference stencils on the window [i-w, i+w], then
/// the weighted antisymmetrization D = (D0 - W^-1 D0^T W)/2, bandwidth and
/// kernel certification. p in {2, 4}; requires w >= p/2 and even dimension.
DerivativeOperator build_derivative(GridPtr grid, int p = 2, int w = 1);

struct AxiomThresholds {
    double representability = 1e-13;            // axiom 1
    double integral_vs_quadrature = 1e-4;       // axiom 2
    double consistency_constant = 2000.0;        // axiom 4: err <= C h^2
    double kernel_floor_scale = 1e-8;           // axiom 5: sigma_min > scale/h
    double antisymmetry_scale = 1e-14;          // axiom 7: defect <= scale/h
};

/// Numeric certification of the seven axioms for (grid, D); every entry is a
/// measured number against an explicit threshold.
AxiomReport check_axioms(const GridPtr& grid, const DerivativeOperator& D,
                         const AxiomThresholds& thresholds = {});

} // namespace ultralab
