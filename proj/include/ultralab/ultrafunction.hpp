#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <iosfwd>

#include "ultralab/grid.hpp"

namespace ultralab {

using Complex = std::complex<double>;

/// A grid function: one complex value per node of its grid. Immutable grid
/// binding; arithmetic requires the same grid object.
class Ultrafunction {
public:
    Ultrafunction(GridPtr grid, Eigen::VectorXcd values);
    static Ultrafunction zero(GridPtr grid);

    const GridPtr& grid() const { return grid_; }
    const Eigen::VectorXcd& values() const { return values_; }
    Eigen::VectorXcd& values() { return values_; }
    std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }
    Complex operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    /// Value at the node equal to `a` (domain error if not a node).
    Complex at_node(double a) const;

    Ultrafunction operator+(const Ultrafunction& o) const;
    Ultrafunction operator-(const Ultrafunction& o) const;
    Ultrafunction operator*(Complex c) const;

private:
    GridPtr grid_;
    Eigen::VectorXcd values_;
};

/// True when u and v live on the same grid object.
bool same_grid(const Ultrafunction& u, const Ultrafunction& v);

/// The weighted hyperfinite sum  sum_a u(a) d(a).
Complex pointwise_integral(const Ultrafunction& u);

/// Sesquilinear form  sum_x u(x) conj(v(x)) d(x); domain error on grid mismatch.
Complex inner_product(const Ultrafunction& u, const Ultrafunction& v);
double norm(const Ultrafunction& u);
Ultrafunction normalized(const Ultrafunction& u);

/// The Dirac ultrafunction at node a: 1/d(a) there, 0 elsewhere. Sifting
/// against any grid function returns the value at a exactly.
Ultrafunction delta(GridPtr grid, double a);
/// delta(a) * sqrt(d(a)), a unit vector of the delta basis.
Ultrafunction normalized_delta(GridPtr grid, double a);

/// Restriction of f to the nodes; non-evaluable points (NaN/inf) become 0.
Ultrafunction embed_continuous(GridPtr grid, const std::function<Complex(double)>& f);
Ultrafunction embed_continuous_real(GridPtr grid, const std::function<double(double)>& f);

/// Riesz representative of an integrable f against the hat-function space of
/// the grid: value (1/d(a)) * integral of f * hat_a, elementwise quadrature.
Ultrafunction embed_weak(GridPtr grid, const std::function<double(double)>& f);

/// CSV serialization with columns node,weight,re,im (17 significant digits).
void write_csv(std::ostream& os, const Ultrafunction& u);

} // namespace ultralab
