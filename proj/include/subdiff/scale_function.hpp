#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "subdiff/types.hpp"

namespace subdiff {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One power segment: exponent `beta` on (previous r_max, r_max].
struct Segment {
    double r_max;  // upper breakpoint in radius space; kInf on the last segment
    double beta;   // local exponent, > 0
};

/// Piecewise-power homeomorphism of [0,inf): psi(r) = a_i * r^{beta_i} on the
/// i-th segment, with a_0 = c0 and every later coefficient fixed by continuity
/// at the breakpoints. Strictly increasing, psi(0) = 0, psi(r) -> inf.
///
/// For this representation the two-sided power comparability
///   (R/r)^{beta_min} <= psi(R)/psi(r) <= (R/r)^{beta_max},  0 < r <= R,
/// holds with constant 1.
///
/// Immutable after construction; safe for unrestricted concurrent reads.
class ScaleFunction {
public:
    ScaleFunction(double c0, std::vector<Segment> segments);

    /// Single-segment pure power c0 * r^beta.
    static ScaleFunction power(double beta, double c0 = 1.0);

    double operator()(double r) const;

    /// Unique r with psi(r) = t; closed form per segment.
    double inverse(double t) const;

    std::size_t segment_count() const { return segments_.size(); }
    const std::vector<Segment>& segments() const { return segments_; }
    double c0() const { return c0_; }
    /// Coefficient a_i of segment i (a_0 == c0).
    double coefficient(std::size_t i) const { return coeff_[i]; }
    /// psi evaluated at segment i's upper breakpoint (kInf for the last).
    double value_at_break(std::size_t i) const { return value_at_break_[i]; }

    double beta_min() const { return beta_min_; }
    double beta_max() const { return beta_max_; }
    /// Exponent and coefficient of the innermost segment (behavior near 0).
    double inner_beta() const { return segments_.front().beta; }
    double inner_coeff() const { return coeff_.front(); }

    /// Index of the segment containing radius r > 0.
    std::size_t segment_at(double r) const;
    /// Index of the segment whose value range contains t > 0.
    std::size_t segment_at_value(double t) const;

    bool operator==(const ScaleFunction& other) const;

private:
    double c0_;
    std::vector<Segment> segments_;
    std::vector<double> coeff_;
    std::vector<double> value_at_break_;
    double beta_min_, beta_max_;
};

/// Two-sided comparability certificate: for all 0 < r <= R,
/// C^{-1} (R/r)^{beta_lo} <= psi(R)/psi(r) <= C (R/r)^{beta_hi}.
struct ScaleBounds {
    double C;        // >= 1
    double beta_lo;  // > 0
    double beta_hi;  // >= beta_lo
};

/// Exact bounds (C = 1, min/max exponent) for the piecewise-power
/// representation, validated on a dyadic grid spanning >= 8 decades.
/// Throws CertificationError on violation (possible only via a bug).
ScaleBounds certify_scale_bounds(const ScaleFunction& psi);

/// psi_j(psi_c^{-1}(t)) for a single t > 0.
double compose_inverse(const ScaleFunction& psi_j, const ScaleFunction& psi_c,
                       double t);

/// The map t -> psi_j(psi_c^{-1}(t)) as a scale function of t: exponents
/// beta_j/beta_c on value-space segments, breakpoints at psi_c(r_k).
ScaleFunction compose_inverse_symbolic(const ScaleFunction& psi_j,
                                       const ScaleFunction& psi_c);

}  // namespace subdiff
