#include "ultralab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ultralab {

std::optional<std::size_t> Grid::find_node(double a) const {
    const double tol = h_ * 1e-9;
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), a - tol);
    if (it == nodes_.end() || std::abs(*it - a) > tol) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

GridPtr build_grid(const LevelChain& chain, int m, Interval domain, double pad,
                   std::span<const double> required) {
    if (!(domain.lo < domain.hi)) throw std::invalid_argument("build_grid: domain must satisfy a < b");
    if (pad < 0.0) throw std::invalid_argument("build_grid: pad must be nonnegative");
    if (!chain.contains(m)) throw std::invalid_argument("build_grid: level outside chain");

    const double h = chain.h(m);
    const double lo = domain.lo - pad, hi = domain.hi + pad;
    const auto n_cells = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9));

    auto grid = std::shared_ptr<Grid>(new Grid());
    grid->level_ = m;
    grid->h_ = h;
    grid->domain_ = domain;
    grid->pad_ = pad;

    auto& x = grid->nodes_;
    x.reserve(n_cells + required.size() + 2);
    for (std::size_t k = 0; k <= n_cells; ++k) x.push_back(lo + static_cast<double>(k) * h);

    const double merge_tol = h * 1e-9;
    for (double r : required) {
        if (r < lo - merge_tol || r > hi + merge_tol)
            throw std::invalid_argument("build_grid: required point outside padded domain");
        auto it = std::lower_bound(x.begin(), x.end(), r - merge_tol);
        if (it != x.end() && std::abs(*it - r) <= merge_tol)
            *it = r;  // snap so the required value appears exactly
        else
            x.insert(it, r);
    }

    if (x.size() % 2 == 1) x.push_back(x.back() + h);

    const std::size_t n = x.size();
    auto& d = grid->weights_;
    d.resize(n);
    d[0] = 0.5 * (x[1] - x[0]);
    d[n - 1] = 0.5 * (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = 0.5 * (x[i + 1] - x[i - 1]);

    for (std::size_t i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1])) throw std::runtime_error("build_grid: nodes not strictly increasing");
    double dsum = 0.0;
    for (double w : d) {
        if (!(w > 0.0)) throw std::runtime_error("build_grid: nonpositive quadrature weight");
        dsum += w;
    }
    if (std::abs(dsum - (x.back() - x.front())) > 1e-12 * (x.back() - x.front()))
        throw std::runtime_error("build_grid: weights do not sum to the node span");

    return grid;
}

} // namespace ultralab
