#include "subdiff/heat_kernel.hpp"

#include <cmath>
#include <sstream>

namespace subdiff {

double VolumeModel::operator()(double r) const {
    if (r < 0.0 || std::isnan(r)) throw std::invalid_argument("VolumeModel: negative radius");
    return c_V * std::pow(r, alpha_v);
}

double VolumeModel::doubling_constant() const { return std::pow(2.0, alpha_v); }

std::pair<double, double> VolumeModel::reverse_doubling() const {
    return {2.0, std::pow(2.0, alpha_v)};
}

VolumeModel VolumeModel::euclidean(int n) {
    if (n < 1) throw std::invalid_argument("VolumeModel::euclidean: n >= 1 required");
    const double c = std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    return VolumeModel{(double)n, c};
}

double phi_sup(const ScaleFunction& psi, double R, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("phi_sup: t must be positive");
    if (R < 0.0 || std::isnan(R)) throw std::invalid_argument("phi_sup: R must be >= 0");
    if (R == 0.0) return 0.0;

    // r -> 0 edge, governed by the innermost segment c r^beta.
    const double b0 = psi.inner_beta();
    const double a0 = psi.inner_coeff();
    if (b0 < 1.0) return kInf;
    if (b0 == 1.0 && R * a0 > t) return kInf;

    double best = 0.0;  // the r -> inf limit
    auto objective = [&](double r) { return R / r - t / psi(r); };

    double lo = 0.0;
    for (std::size_t i = 0; i < psi.segment_count(); ++i) {
        const double hi = psi.segments()[i].r_max;
        const double beta = psi.segments()[i].beta;
        const double coeff = psi.coefficient(i);
        if (beta != 1.0) {
            // Stationary point of R/r - t/(c r^beta) in log space.
            const double ln_rstar =
                (std::log(beta * t) - std::log(coeff * R)) / (beta - 1.0);
            const double ln_lo = (lo == 0.0) ? -kInf : std::log(lo);
            const double ln_hi = (hi == kInf) ? kInf : std::log(hi);
            if (ln_rstar > ln_lo && ln_rstar < ln_hi) {
                // Closed form at the stationary point: (R/r*)(1 - 1/beta);
                // avoids inf - inf when r* is extreme.
                const double val = std::exp(std::log(R) - ln_rstar) * (1.0 - 1.0 / beta);
                best = std::max(best, val);
            }
        }
        if (hi != kInf) best = std::max(best, objective(hi));
        lo = hi;
    }
    return best;
}

double gaussian_kernel(int n, double t, double d) {
    if (n < 1) throw std::invalid_argument("gaussian_kernel: n >= 1 required");
    if (!(t > 0.0)) throw std::invalid_argument("gaussian_kernel: t must be positive");
    if (d < 0.0 || std::isnan(d)) throw std::invalid_argument("gaussian_kernel: d must be >= 0");
    return std::pow(4.0 * M_PI * t, -0.5 * n) * std::exp(-d * d / (4.0 * t));
}

HeatKernelModel::HeatKernelModel(int dimension, ScaleFunction psi_c, VolumeModel volume,
                                 double C1, double c1, double c2, double c3, double delta)
    : dimension_(dimension),
      psi_c_(std::move(psi_c)),
      volume_(volume),
      C1_(C1),
      c1_(c1),
      c2_(c2),
      c3_(c3),
      delta_(delta) {}

HeatKernelModel HeatKernelModel::exact_gaussian(int n) {
    if (n < 1) throw std::invalid_argument("HeatKernelModel: dimension >= 1 required");
    const VolumeModel vol = VolumeModel::euclidean(n);
    // With these constants the upper envelope equals the Gaussian kernel and
    // the near-diagonal lower envelope is tight at d = psi_c^{-1}(t).
    const double K = vol.c_V * std::pow(4.0 * M_PI, -0.5 * n);
    return HeatKernelModel(n, ScaleFunction::power(2.0), vol,
                           /*C1=*/K, /*c1=*/1.0, /*c2=*/1.0,
                           /*c3=*/K * std::exp(-0.25), /*delta=*/1.0);
}

HeatKernelModel HeatKernelModel::sub_gaussian(ScaleFunction psi_c, VolumeModel volume,
                                              double C1, double c1, double c2, double c3,
                                              double delta, Validation validation) {
    if (!(volume.alpha_v > 0.0) || !(volume.c_V > 0.0))
        throw std::invalid_argument("HeatKernelModel: volume parameters must be positive");
    if (!(C1 > 0.0) || !(c1 > 0.0) || !(c2 > 0.0) || !(c3 > 0.0))
        throw std::invalid_argument("HeatKernelModel: envelope constants must be positive");
    if (!(delta > 0.0) || delta > 1.0)
        throw std::invalid_argument("HeatKernelModel: delta must lie in (0, 1]");
    if (!(psi_c.beta_min() > 1.0))
        throw std::invalid_argument(
            "HeatKernelModel: psi_c must have all exponents > 1 (otherwise the "
            "off-diagonal rate diverges)");
    HeatKernelModel m(0, std::move(psi_c), volume, C1, c1, c2, c3, delta);
    if (validation == Validation::strict) m.check_envelopes();
    return m;
}

void HeatKernelModel::check_envelopes() const {
    // Kernel must sit inside the envelopes: below upper everywhere sampled,
    // above lower wherever the lower applies.
    for (int ti = 0; ti <= 24; ++ti) {
        const double t = std::pow(10.0, -3.0 + 0.25 * ti);
        const double scale = psi_c_.inverse(t);
        const double d_checks[] = {0.0,          0.25 * delta_ * scale,
                                   0.5 * delta_ * scale, 0.99 * delta_ * scale,
                                   scale,        2.0 * scale,
                                   8.0 * scale};
        for (double d : d_checks) {
            const double k = kernel(t, d);
            const double up = upper(t, d);
            if (k > up * (1.0 + 1e-12)) {
                std::ostringstream msg;
                msg << "HeatKernelModel: kernel exceeds upper envelope at t=" << t
                    << " d=" << d;
                throw std::invalid_argument(msg.str());
            }
            if (auto low = lower_near(t, d)) {
                if (k < *low * (1.0 - 1e-12)) {
                    std::ostringstream msg;
                    msg << "HeatKernelModel: kernel below lower envelope at t=" << t
                        << " d=" << d;
                    throw std::invalid_argument(msg.str());
                }
            }
        }
    }
}

double HeatKernelModel::on_diagonal_prefactor() const {
    return is_gaussian() ? volume_.c_V * std::pow(4.0 * M_PI, -0.5 * dimension_) : 1.0;
}

double HeatKernelModel::upper(double t, double d) const {
    if (!(t > 0.0)) throw std::invalid_argument("hke_upper: t must be positive");
    const double scale = psi_c_.inverse(t);
    return C1_ / volume_(scale) * std::exp(-c1_ * phi_sup(psi_c_, c2_ * d, t));
}

std::optional<double> HeatKernelModel::lower_near(double t, double d) const {
    if (!(t > 0.0)) throw std::invalid_argument("hke_lower_near: t must be positive");
    const double scale = psi_c_.inverse(t);
    if (d > delta_ * scale) return std::nullopt;
    return c3_ / volume_(scale);
}

double HeatKernelModel::kernel(double t, double d) const {
    if (is_gaussian()) return gaussian_kernel(dimension_, t, d);
    const double scale = psi_c_.inverse(t);
    return std::exp(-phi_sup(psi_c_, d, t)) / volume_(scale);
}

double hke_upper(const HeatKernelModel& model, double t, double d) {
    return model.upper(t, d);
}

std::optional<double> hke_lower_near(const HeatKernelModel& model, double t, double d) {
    return model.lower_near(t, d);
}

double model_kernel(const HeatKernelModel& model, double t, double d) {
    return model.kernel(t, d);
}

}  // namespace subdiff
