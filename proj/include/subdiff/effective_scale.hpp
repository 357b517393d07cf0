#pragma once

#include <span>

#include "subdiff/piecewise_power.hpp"
#include "subdiff/scale_function.hpp"

namespace subdiff {

/// The effective space-time scaling of the subordinated jump process:
///   psi_hat(r) = psi_c(r) / I(r),  I(r) = int_0^r psi_c(s) / (s psi_j(s)) ds.
/// I carries additive constants across breakpoints, so psi_hat is not itself
/// piecewise power; it is exposed as an evaluator with exact segment
/// integrals. Construction refuses on a divergent criterion.
class EffectiveScale {
public:
    EffectiveScale(ScaleFunction psi_c, ScaleFunction psi_j);

    /// I(r), exact.
    double integral(double r) const;
    /// psi_hat(r).
    double operator()(double r) const;

    const ScaleFunction& psi_c() const { return psi_c_; }
    const ScaleFunction& psi_j() const { return psi_j_; }

private:
    ScaleFunction psi_c_, psi_j_;
    PiecewisePower integrand_;
};

double effective_scale_eval(const ScaleFunction& psi_c, const ScaleFunction& psi_j,
                            double r);

/// Grid certification of the two-sided power bounds for psi_hat over nine
/// decades: per-pair log slopes give empirical (beta_lo, beta_hi) with C = 1.
/// Throws CertificationError if psi_hat fails to increase on the grid.
ScaleBounds certify_effective_bounds(const ScaleFunction& psi_c,
                                     const ScaleFunction& psi_j);

/// Smallest grid constants for the comparability suite relating psi_hat to
/// the input scales, with refinement stability (< 5% drift when the grid
/// density doubles) as the pass condition:
///   cor1:  psi_hat(r) <= C psi_j(r)            all r
///   cor2:  psi_c(r)   <= C psi_j(r)            r <= 1
///   cor3:  psi_hat(R)/psi_hat(r) <= C psi_c(R)/psi_c(r)   r <= R
///   cor4a: psi_hat(r) <= C psi_c(r)            r >= 1
///   cor4b: psi_c(r)   <= C psi_hat(r)          r <= 1
struct CorollaryConstants {
    double cor1, cor2, cor3, cor4a, cor4b;
    double max_refinement_drift;
    bool pass;
};

CorollaryConstants verify_corollary_inequalities(const ScaleFunction& psi_c,
                                                 const ScaleFunction& psi_j,
                                                 std::span<const double> r_grid);

}  // namespace subdiff
