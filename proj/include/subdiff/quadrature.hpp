#pragma once

#include <functional>

namespace subdiff::quad {

/// Composite 16-point Gauss-Legendre over [a, b], fixed panel count.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels);

/// Composite 16-point Gauss-Legendre in log space over [a, b], 0 < a < b,
/// with `panels_per_decade` panels per decade (at least one panel total).
/// Deterministic: no adaptive subdivision.
double integrate_log(const std::function<double(double)>& f, double a, double b,
                     int panels_per_decade);

/// Certified elementary bound on the upper incomplete gamma integral
/// int_x^inf w^{a-1} e^{-w} dw, valid for x >= 2*max(a-1, 1) + 2.
/// Returns +inf when x is below the validity threshold.
double upper_gamma_bound(double a, double x);

}  // namespace subdiff::quad
