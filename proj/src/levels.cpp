#include "ultralab/levels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ultralab {

LevelChain::LevelChain(int lo, int hi, double base) : m_min(lo), m_max(hi), h0(base) {
    if (m_min > m_max) throw std::invalid_argument("LevelChain: m_min > m_max");
    if (m_min < 0 || m_max > 30) throw std::invalid_argument("LevelChain: level out of [0, 30]");
    if (!(h0 > 0.0)) throw std::invalid_argument("LevelChain: h0 must be positive");
}

double LevelChain::h(int m) const { return h0 * std::ldexp(1.0, -m); }

double LevelChain::alpha(int m) const { return level_alpha(m); }

double level_alpha(int m) { return std::ldexp(1.0, 2 * m); }

std::int64_t LevelChain::naturals_section(int m) const {
    return std::int64_t{1} << (2 * m);
}

AsymptoticProfile asymptotic_profile(const Net& net, const LevelChain& chain) {
    if (chain.size() < 3) throw std::invalid_argument("asymptotic_profile: need at least 3 levels");

    std::vector<double> xs, ys;
    bool absolute = false;
    for (int m = chain.m_min; m <= chain.m_max; ++m) {
        const double v = net(m);
        if (v == 0.0) { absolute = true; continue; }  // log undefined, skip
        if (v < 0.0) absolute = true;
        xs.push_back(m * std::log(2.0));
        ys.push_back(std::log(std::abs(v)));
    }
    if (xs.size() < 3) throw std::invalid_argument("asymptotic_profile: fewer than 3 nonzero net values");

    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;

    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fit = intercept + slope * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
    }

    AsymptoticProfile p;
    p.exponent = slope;
    // value ~ c * h^-q with h = h0 * 2^-m, so log v = [log c - q log h0] + q m log 2.
    p.coefficient = std::exp(intercept + slope * std::log(chain.h0));
    p.r_squared = ss_tot > 1e-28 ? 1.0 - ss_res / ss_tot : (ss_res < 1e-20 ? 1.0 : 0.0);
    p.used_absolute_values = absolute;
    // readout resolution: exponent quantized to 1/32 steps (half of it per alpha power)
    p.rendered = EuclideanScalar::monomial(p.coefficient, Rational(std::llround(p.exponent * 16), 32));
    return p;
}

namespace {

bool is_natural(double x) {
    return x >= 1.0 && x == std::floor(x) && x <= 9.007199254740992e15;
}

} // namespace

std::int64_t numerosity(const std::vector<double>& finite_set, int m, const LevelChain& chain) {
    if (!chain.contains(m)) throw std::invalid_argument("numerosity: level outside chain");
    std::vector<double> sorted = finite_set;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const double section = static_cast<double>(chain.naturals_section(m));
    std::int64_t count = 0;
    for (double x : sorted) {
        if (!is_natural(x) || x <= section) ++count;
    }
    return count;
}

std::int64_t numerosity_naturals(int m, const LevelChain& chain) {
    if (!chain.contains(m)) throw std::invalid_argument("numerosity: level outside chain");
    return chain.naturals_section(m);
}

std::optional<double> standard_limit_check(const Net& net, const LevelChain& chain, double tol) {
    if (chain.size() < 3) throw std::invalid_argument("standard_limit_check: need at least 3 levels");
    std::vector<double> v;
    for (int m = chain.m_min; m <= chain.m_max; ++m) v.push_back(net(m));

    const std::size_t n = v.size();
    const double d_last = std::abs(v[n - 1] - v[n - 2]);
    const double d_first = std::abs(v[1] - v[0]);
    if (!(d_last <= tol) || d_last > d_first + tol) return std::nullopt;

    // Aitken extrapolation from the last three values when contraction holds.
    const double d1 = v[n - 1] - v[n - 2];
    const double d0 = v[n - 2] - v[n - 3];
    if (d0 != 0.0) {
        const double r = d1 / d0;
        if (std::abs(r) < 1.0) return v[n - 1] + d1 * r / (1.0 - r);
    }
    return v[n - 1];
}

} // namespace ultralab
