#pragma once

#include <functional>

namespace ultralab {

/// Adaptive Simpson quadrature with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

/// Fixed-order Gauss-Legendre rule on [a, b] (12 points).
double gauss_legendre(const std::function<double(double)>& f, double a, double b);

} // namespace ultralab
