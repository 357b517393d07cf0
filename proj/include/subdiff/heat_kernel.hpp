#pragma once

#include <optional>

#include "subdiff/scale_function.hpp"

namespace subdiff {

/// Ahlfors-regular volume profile V(r) = c_V * r^{alpha_v}. Doubling holds
/// with constant 2^{alpha_v}; reverse doubling with A = 2, C = 2^{alpha_v}.
struct VolumeModel {
    double alpha_v;
    double c_V;

    double operator()(double r) const;
    double doubling_constant() const;
    /// Reverse-doubling pair (A, C): V(A r) >= C V(r).
    std::pair<double, double> reverse_doubling() const;

    /// Lebesgue ball volume in R^n: c_V = pi^{n/2} / Gamma(n/2 + 1).
    static VolumeModel euclidean(int n);
};

/// sup_{r>0} (R/r - t/psi(r)), the off-diagonal decay rate of a kernel with
/// space-time scaling psi. Computed exactly: per power segment the interior
/// stationary point is (beta t / (c R))^{1/(beta-1)}, clamped to the segment;
/// candidates are stationary points, breakpoints, and the r->inf limit 0.
/// Always >= 0. Returns +inf when the innermost exponent makes the r->0 edge
/// diverge (beta < 1, or beta == 1 with R > t/c).
double phi_sup(const ScaleFunction& psi, double R, double t);

/// (4 pi t)^{-n/2} exp(-d^2 / (4t)).
double gaussian_kernel(int n, double t, double d);

/// Transition-density model with two-sided sub-Gaussian envelopes
///   upper(t,d) = C1 / V(psi_c^{-1}(t)) * exp(-c1 phi_sup(psi_c, c2 d, t))
///   lower(t,d) = c3 / V(psi_c^{-1}(t))      for d <= delta psi_c^{-1}(t).
/// The exact Gaussian variant is the kernel of Brownian motion on R^n; the
/// sub-Gaussian variant is an envelope-shaped surrogate (not normalized),
/// adequate for every two-sided-bound claim made downstream.
///
/// Immutable; all evaluations pure and safe for concurrent use.
class HeatKernelModel {
public:
    enum class Validation { strict, off };

    static HeatKernelModel exact_gaussian(int n);
    static HeatKernelModel sub_gaussian(ScaleFunction psi_c, VolumeModel volume,
                                        double C1, double c1, double c2, double c3,
                                        double delta,
                                        Validation validation = Validation::strict);

    bool is_gaussian() const { return dimension_ > 0; }
    int dimension() const { return dimension_; }
    const ScaleFunction& psi_c() const { return psi_c_; }
    const VolumeModel& volume() const { return volume_; }
    double C1() const { return C1_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double c3() const { return c3_; }
    double delta() const { return delta_; }
    /// Prefactor K with kernel(t, d) = K / V(psi_c^{-1}(t)) * exp(-phi_sup(psi_c, d, t)).
    double on_diagonal_prefactor() const;

    double upper(double t, double d) const;
    std::optional<double> lower_near(double t, double d) const;
    double kernel(double t, double d) const;

private:
    HeatKernelModel(int dimension, ScaleFunction psi_c, VolumeModel volume,
                    double C1, double c1, double c2, double c3, double delta);
    void check_envelopes() const;

    int dimension_;  // > 0 for the exact Gaussian; 0 for the sub-Gaussian model
    ScaleFunction psi_c_;
    VolumeModel volume_;
    double C1_, c1_, c2_, c3_, delta_;
};

double hke_upper(const HeatKernelModel& model, double t, double d);
std::optional<double> hke_lower_near(const HeatKernelModel& model, double t, double d);
double model_kernel(const HeatKernelModel& model, double t, double d);

}  // namespace subdiff
