#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ultralab/euclidean.hpp"

namespace ultralab {

/// One canonical increasing chain of refinement levels, the operational
/// stand-in for the directed family of finite stages. Spacing halves per
/// level, the infinite unit quadruples, and the naturals section at level m
/// is {1, ..., 4^m}.
struct LevelChain {
    int m_min = 4;
    int m_max = 9;
    double h0 = 1.0;

    LevelChain() = default;
    LevelChain(int lo, int hi, double base = 1.0);

    double h(int m) const;
    double alpha(int m) const;            // 4^m == h(m)^-2 * h0^2
    std::int64_t naturals_section(int m) const;  // |N cap level m| = 4^m
    bool contains(int m) const { return m >= m_min && m <= m_max; }
    int size() const { return m_max - m_min + 1; }
};

/// The infinite-unit value at level m (4^m), independent of the chain base.
double level_alpha(int m);

/// A net assigns a value to every level of a chain.
using Net = std::function<double(int)>;

/// Result of the log-log power-law fit value(m) ~ coefficient * h(m)^-exponent.
/// `rendered` is the scalar coefficient * a^(exponent/2), the level-chain
/// reading of the divergence order. `used_absolute_values` flags nets with
/// zero or sign-changing values, which are fitted on |value|.
struct AsymptoticProfile {
    double exponent = 0.0;
    double coefficient = 0.0;
    double r_squared = 0.0;
    bool used_absolute_values = false;
    EuclideanScalar rendered;
};

/// Ordinary least squares on (m*log 2, log|value(m)|); needs at least three
/// usable (nonzero) levels, otherwise a domain error.
AsymptoticProfile asymptotic_profile(const Net& net, const LevelChain& chain);

/// Counting measure at one level: non-natural reals always count, naturals
/// count when they are within the level's section {1..4^m}. Duplicates in the
/// list are counted once (the argument is a set).
std::int64_t numerosity(const std::vector<double>& finite_set, int m, const LevelChain& chain);
std::int64_t numerosity_naturals(int m, const LevelChain& chain);

/// Detects a Cauchy limit along the chain: if the successive differences have
/// fallen below `tol` (and are not growing), returns the extrapolated limit;
/// otherwise empty. This is the standard part of the chain limit whenever the
/// profile exponent is zero.
std::optional<double> standard_limit_check(const Net& net, const LevelChain& chain, double tol);

} // namespace ultralab
