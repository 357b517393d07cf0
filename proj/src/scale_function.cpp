#include "subdiff/scale_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subdiff {

ScaleFunction::ScaleFunction(double c0, std::vector<Segment> segments)
    : c0_(c0), segments_(std::move(segments)) {
    if (!(c0_ > 0.0) || !std::isfinite(c0_))
        throw std::invalid_argument("ScaleFunction: c0 must be positive and finite");
    if (segments_.empty())
        throw std::invalid_argument("ScaleFunction: at least one segment required");
    double prev = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (!(s.beta > 0.0) || !std::isfinite(s.beta))
            throw std::invalid_argument("ScaleFunction: exponents must be positive and finite");
        const bool last = (i + 1 == segments_.size());
        if (last) {
            if (s.r_max != kInf)
                throw std::invalid_argument("ScaleFunction: last segment must extend to infinity");
        } else {
            if (!(s.r_max > prev) || !std::isfinite(s.r_max))
                throw std::invalid_argument(
                    "ScaleFunction: breakpoints must be finite and strictly increasing");
        }
        prev = s.r_max;
    }

    coeff_.resize(segments_.size());
    value_at_break_.resize(segments_.size());
    coeff_[0] = c0_;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].r_max == kInf) {
            value_at_break_[i] = kInf;
        } else {
            value_at_break_[i] = coeff_[i] * std::pow(segments_[i].r_max, segments_[i].beta);
        }
        if (i + 1 < segments_.size())
            coeff_[i + 1] =
                value_at_break_[i] / std::pow(segments_[i].r_max, segments_[i + 1].beta);
    }

    beta_min_ = beta_max_ = segments_[0].beta;
    for (const auto& s : segments_) {
        beta_min_ = std::min(beta_min_, s.beta);
        beta_max_ = std::max(beta_max_, s.beta);
    }
}

ScaleFunction ScaleFunction::power(double beta, double c0) {
    return ScaleFunction(c0, {Segment{kInf, beta}});
}

std::size_t ScaleFunction::segment_at(double r) const {
    std::size_t lo = 0, hi = segments_.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (r <= segments_[mid].r_max)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

std::size_t ScaleFunction::segment_at_value(double t) const {
    std::size_t lo = 0, hi = segments_.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (t <= value_at_break_[mid])
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

double ScaleFunction::operator()(double r) const {
    if (r < 0.0 || std::isnan(r))
        throw std::invalid_argument("ScaleFunction: negative radius");
    if (r == 0.0) return 0.0;
    const std::size_t i = segment_at(r);
    return coeff_[i] * std::pow(r, segments_[i].beta);
}

double ScaleFunction::inverse(double t) const {
    if (t < 0.0 || std::isnan(t))
        throw std::invalid_argument("ScaleFunction: inverse of negative value");
    if (t == 0.0) return 0.0;
    const std::size_t i = segment_at_value(t);
    return std::pow(t / coeff_[i], 1.0 / segments_[i].beta);
}

bool ScaleFunction::operator==(const ScaleFunction& other) const {
    if (c0_ != other.c0_ || segments_.size() != other.segments_.size()) return false;
    for (std::size_t i = 0; i < segments_.size(); ++i)
        if (segments_[i].r_max != other.segments_[i].r_max ||
            segments_[i].beta != other.segments_[i].beta)
            return false;
    return true;
}

ScaleBounds certify_scale_bounds(const ScaleFunction& psi) {
    const ScaleBounds bounds{1.0, psi.beta_min(), psi.beta_max()};

    // Dyadic grid 2^-15 .. 2^15: 9 decades of radii.
    std::vector<double> grid;
    for (int k = -15; k <= 15; ++k) grid.push_back(std::ldexp(1.0, k));
    const double slack = 1e-9;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const double r = grid[a];
        const double pr = psi(r);
        for (std::size_t b = a; b < grid.size(); ++b) {
            const double R = grid[b];
            const double ratio = psi(R) / pr;
            const double lo = std::pow(R / r, bounds.beta_lo);
            const double hi = std::pow(R / r, bounds.beta_hi);
            if (ratio < lo * (1.0 - slack) || ratio > hi * (1.0 + slack)) {
                std::ostringstream msg;
                msg << "scale bound violated at r=" << r << " R=" << R
                    << " ratio=" << ratio << " bounds=[" << lo << "," << hi << "]";
                throw CertificationError(msg.str());
            }
        }
    }
    return bounds;
}

double compose_inverse(const ScaleFunction& psi_j, const ScaleFunction& psi_c,
                       double t) {
    if (!(t > 0.0)) throw std::invalid_argument("compose_inverse: t must be positive");
    return psi_j(psi_c.inverse(t));
}

ScaleFunction compose_inverse_symbolic(const ScaleFunction& psi_j,
                                       const ScaleFunction& psi_c) {
    // Union of finite radius-space breakpoints of both functions.
    std::vector<double> breaks;
    for (const auto& s : psi_c.segments())
        if (s.r_max != kInf) breaks.push_back(s.r_max);
    for (const auto& s : psi_j.segments())
        if (s.r_max != kInf) breaks.push_back(s.r_max);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::vector<Segment> out;
    double prev = 0.0;
    auto interval_exponent = [&](double lo, double hi) {
        const double mid = (hi == kInf) ? lo * 2.0 + 1.0 : 0.5 * (lo + hi);
        const double bj = psi_j.segments()[psi_j.segment_at(mid)].beta;
        const double bc = psi_c.segments()[psi_c.segment_at(mid)].beta;
        return bj / bc;
    };
    for (double b : breaks) {
        const double gamma = interval_exponent(prev, b);
        if (!out.empty() && out.back().beta == gamma)
            out.back().r_max = psi_c(b);  // same exponent: extend
        else
            out.push_back(Segment{psi_c(b), gamma});
        prev = b;
    }
    const double gamma_tail = interval_exponent(prev, kInf);
    if (!out.empty() && out.back().beta == gamma_tail)
        out.back().r_max = kInf;
    else
        out.push_back(Segment{kInf, gamma_tail});

    // First-segment coefficient from the innermost pieces; later coefficients
    // follow by continuity, matching the exact composition.
    const double gamma0 = out.front().beta;
    const double c0 = psi_j.inner_coeff() * std::pow(psi_c.inner_coeff(), -gamma0);
    return ScaleFunction(c0, std::move(out));
}

}  // namespace subdiff
