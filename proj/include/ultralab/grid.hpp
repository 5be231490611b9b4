#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ultralab/levels.hpp"

namespace ultralab {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

class Grid;
using GridPtr = std::shared_ptr<Grid>;

/// One level's finite node set with its quadrature weights d(a) > 0.
///
/// Nodes are strictly increasing, the count is even (a weighted-antisymmetric
/// derivative of odd dimension always has a kernel), and the weights are the
/// composite trapezoid weights of the node set, so they sum to the node span.
class Grid {
public:
    int level() const { return level_; }
    double spacing() const { return h_; }
    std::size_t dim() const { return nodes_.size(); }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    Interval physical_domain() const { return domain_; }
    double pad() const { return pad_; }
    Interval padded_domain() const { return {domain_.lo - pad_, domain_.hi + pad_}; }

    /// Index of the node equal to `a` (tolerance h*1e-9), or empty.
    std::optional<std::size_t> find_node(double a) const;
    bool inside_physical(double x) const { return x >= domain_.lo && x <= domain_.hi; }

    friend GridPtr build_grid(const LevelChain& chain, int m, Interval domain, double pad,
                              std::span<const double> required);

private:
    Grid() = default;

    int level_ = 0;
    double h_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    Interval domain_;
    double pad_ = 0.0;
};

/// Builds the level-m grid: uniform nodes with spacing h(m) over the padded
/// domain, required points inserted exactly, trapezoid weights, and one node
/// appended past the right edge if needed to make the count even.
GridPtr build_grid(const LevelChain& chain, int m, Interval domain, double pad,
                   std::span<const double> required = {});

} // namespace ultralab
