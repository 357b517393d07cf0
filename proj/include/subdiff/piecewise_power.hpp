#pragma once

#include <vector>

#include "subdiff/scale_function.hpp"

namespace subdiff {

/// One piece of a piecewise-power density: coeff * s^expo on (prev upper, upper].
struct PowerPiece {
    double upper;  // kInf on the last piece
    double coeff;  // > 0
    double expo;   // any real
};

/// Nonnegative piecewise-power function on (0, inf) with exact segment
/// antiderivatives. The workhorse behind every criterion/moment integral:
/// convergence at either end is read off the edge exponents, so divergence
/// detection is symbolic, not numeric.
class PiecewisePower {
public:
    explicit PiecewisePower(std::vector<PowerPiece> pieces);

    double operator()(double s) const;
    const std::vector<PowerPiece>& pieces() const { return pieces_; }

    bool converges_at_zero() const { return pieces_.front().expo > -1.0; }
    bool converges_at_inf() const { return pieces_.back().expo < -1.0; }

    /// Integral over (0, x]; +inf when divergent at 0.
    double integral_zero_to(double x) const;
    /// Integral over [x, inf); +inf when divergent at infinity.
    double integral_to_inf(double x) const;
    /// Integral over [a, b], 0 < a <= b < inf.
    double integral(double a, double b) const;

    /// The function s^shift * f(s).
    PiecewisePower shifted(double shift) const;

    /// Finite interior breakpoints.
    std::vector<double> breakpoints() const;

    /// num(s) / den(s) * s^extra as a piecewise power in s.
    static PiecewisePower ratio(const ScaleFunction& num, const ScaleFunction& den,
                                double extra);
    /// s^extra / f(s).
    static PiecewisePower reciprocal(const ScaleFunction& f, double extra);

private:
    std::vector<PowerPiece> pieces_;
    std::size_t piece_at(double s) const;
};

/// Exact integral of c*s^p over [a, b] (a may be 0, b may be kInf);
/// +inf when the improper end diverges. Stable near p == -1.
double power_segment_integral(double c, double p, double a, double b);

}  // namespace subdiff
