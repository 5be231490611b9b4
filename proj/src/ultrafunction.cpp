#include "ultralab/ultrafunction.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ultralab/io.hpp"
#include "ultralab/quadrature.hpp"

namespace ultralab {

Ultrafunction::Ultrafunction(GridPtr grid, Eigen::VectorXcd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("Ultrafunction: null grid");
    if (static_cast<std::size_t>(values_.size()) != grid_->dim())
        throw std::invalid_argument("Ultrafunction: value count differs from grid dimension");
}

Ultrafunction Ultrafunction::zero(GridPtr grid) {
    const auto n = static_cast<Eigen::Index>(grid->dim());
    return Ultrafunction(std::move(grid), Eigen::VectorXcd::Zero(n));
}

Complex Ultrafunction::at_node(double a) const {
    const auto idx = grid_->find_node(a);
    if (!idx) throw std::invalid_argument("Ultrafunction::at_node: not a grid node");
    return values_[static_cast<Eigen::Index>(*idx)];
}

Ultrafunction Ultrafunction::operator+(const Ultrafunction& o) const {
    if (!same_grid(*this, o)) throw std::invalid_argument("Ultrafunction: grid mismatch");
    return Ultrafunction(grid_, values_ + o.values_);
}

Ultrafunction Ultrafunction::operator-(const Ultrafunction& o) const {
    if (!same_grid(*this, o)) throw std::invalid_argument("Ultrafunction: grid mismatch");
    return Ultrafunction(grid_, values_ - o.values_);
}

Ultrafunction Ultrafunction::operator*(Complex c) const {
    return Ultrafunction(grid_, values_ * c);
}

bool same_grid(const Ultrafunction& u, const Ultrafunction& v) {
    return u.grid().get() == v.grid().get();
}

Complex pointwise_integral(const Ultrafunction& u) {
    const auto& d = u.grid()->weights();
    Complex s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += u[i] * d[i];
    return s;
}

Complex inner_product(const Ultrafunction& u, const Ultrafunction& v) {
    if (!same_grid(u, v)) throw std::invalid_argument("inner_product: grid mismatch");
    const auto& d = u.grid()->weights();
    Complex s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += u[i] * std::conj(v[i]) * d[i];
    return s;
}

double norm(const Ultrafunction& u) {
    const auto& d = u.grid()->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += std::norm(u[i]) * d[i];
    return std::sqrt(s);
}

Ultrafunction normalized(const Ultrafunction& u) {
    const double n = norm(u);
    if (n == 0.0) throw std::invalid_argument("normalized: zero ultrafunction");
    return u * Complex(1.0 / n, 0.0);
}

Ultrafunction delta(GridPtr grid, double a) {
    const auto idx = grid->find_node(a);
    if (!idx) throw std::invalid_argument("delta: point is not a grid node");
    Ultrafunction u = Ultrafunction::zero(grid);
    u.values()[static_cast<Eigen::Index>(*idx)] = 1.0 / grid->weight(*idx);
    return u;
}

Ultrafunction normalized_delta(GridPtr grid, double a) {
    const auto idx = grid->find_node(a);
    if (!idx) throw std::invalid_argument("normalized_delta: point is not a grid node");
    Ultrafunction u = Ultrafunction::zero(grid);
    u.values()[static_cast<Eigen::Index>(*idx)] = 1.0 / std::sqrt(grid->weight(*idx));
    return u;
}

Ultrafunction embed_continuous(GridPtr grid, const std::function<Complex(double)>& f) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(grid->dim()));
    const auto x = grid->nodes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        Complex y = f(x[i]);
        if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) y = 0.0;
        v[static_cast<Eigen::Index>(i)] = y;
    }
    return Ultrafunction(std::move(grid), std::move(v));
}

Ultrafunction embed_continuous_real(GridPtr grid, const std::function<double(double)>& f) {
    return embed_continuous(std::move(grid),
                            [&f](double x) { return Complex(f(x), 0.0); });
}

Ultrafunction embed_weak(GridPtr grid, const std::function<double(double)>& f) {
    const auto x = grid->nodes();
    const std::size_t n = x.size();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    // integral of f * hat_a over the two elements adjacent to a; quadrature is
    // per element, so integrand kinks at the nodes are harmless.
    for (std::size_t a = 0; a < n; ++a) {
        double acc = 0.0;
        if (a > 0) {
            const double xl = x[a - 1], xr = x[a];
            acc += gauss_legendre(
                [&](double t) { return f(t) * (t - xl) / (xr - xl); }, xl, xr);
        }
        if (a + 1 < n) {
            const double xl = x[a], xr = x[a + 1];
            acc += gauss_legendre(
                [&](double t) { return f(t) * (xr - t) / (xr - xl); }, xl, xr);
        }
        v[static_cast<Eigen::Index>(a)] = acc / grid->weight(a);
    }
    return Ultrafunction(std::move(grid), std::move(v));
}

void write_csv(std::ostream& os, const Ultrafunction& u) {
    os << "node,weight,re,im\n";
    const auto x = u.grid()->nodes();
    const auto d = u.grid()->weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
        os << fmt_g17(x[i]) << ',' << fmt_g17(d[i]) << ',' << fmt_g17(u[i].real()) << ','
           << fmt_g17(u[i].imag()) << '\n';
    }
}

} // namespace ultralab
