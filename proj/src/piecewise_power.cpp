#include "subdiff/piecewise_power.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subdiff {

double power_segment_integral(double c, double p, double a, double b) {
    if (a > b) throw std::invalid_argument("power_segment_integral: a > b");
    if (a == b) return 0.0;
    const double q = p + 1.0;
    if (a == 0.0) {
        if (q <= 0.0) return kInf;
        return (b == kInf) ? kInf : c * std::pow(b, q) / q;
    }
    if (b == kInf) {
        if (q >= 0.0) return kInf;
        return -c * std::pow(a, q) / q;
    }
    if (q == 0.0) return c * std::log(b / a);
    // a^q * expm1(q log(b/a)) / q: exact as q -> 0, no cancellation.
    return c * std::pow(a, q) * std::expm1(q * std::log(b / a)) / q;
}

PiecewisePower::PiecewisePower(std::vector<PowerPiece> pieces)
    : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("PiecewisePower: no pieces");
    double prev = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const bool last = (i + 1 == pieces_.size());
        if (last) {
            if (pieces_[i].upper != kInf)
                throw std::invalid_argument("PiecewisePower: last piece must reach infinity");
        } else if (!(pieces_[i].upper > prev) || !std::isfinite(pieces_[i].upper)) {
            throw std::invalid_argument("PiecewisePower: breakpoints must increase");
        }
        if (!(pieces_[i].coeff > 0.0))
            throw std::invalid_argument("PiecewisePower: coefficients must be positive");
        prev = pieces_[i].upper;
    }
}

std::size_t PiecewisePower::piece_at(double s) const {
    std::size_t lo = 0, hi = pieces_.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (s <= pieces_[mid].upper)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

double PiecewisePower::operator()(double s) const {
    if (!(s > 0.0)) throw std::invalid_argument("PiecewisePower: s must be positive");
    const auto& p = pieces_[piece_at(s)];
    return p.coeff * std::pow(s, p.expo);
}

double PiecewisePower::integral_zero_to(double x) const {
    if (!(x > 0.0)) return 0.0;
    double acc = 0.0, lo = 0.0;
    for (const auto& p : pieces_) {
        const double hi = std::min(p.upper, x);
        acc += power_segment_integral(p.coeff, p.expo, lo, hi);
        if (hi == x) break;
        lo = p.upper;
    }
    return acc;
}

double PiecewisePower::integral_to_inf(double x) const {
    double acc = 0.0, lo = 0.0;
    for (const auto& p : pieces_) {
        const double a = std::max(lo, x);
        if (p.upper > a) acc += power_segment_integral(p.coeff, p.expo, a, p.upper);
        lo = p.upper;
    }
    return acc;
}

double PiecewisePower::integral(double a, double b) const {
    if (!(a > 0.0) || !(b >= a) || b == kInf)
        throw std::invalid_argument("PiecewisePower::integral: need 0 < a <= b < inf");
    double acc = 0.0, lo = 0.0;
    for (const auto& p : pieces_) {
        const double seg_lo = std::max(lo, a);
        const double seg_hi = std::min(p.upper, b);
        if (seg_hi > seg_lo) acc += power_segment_integral(p.coeff, p.expo, seg_lo, seg_hi);
        lo = p.upper;
        if (lo >= b) break;
    }
    return acc;
}

PiecewisePower PiecewisePower::shifted(double shift) const {
    std::vector<PowerPiece> out = pieces_;
    for (auto& p : out) p.expo += shift;
    return PiecewisePower(std::move(out));
}

std::vector<double> PiecewisePower::breakpoints() const {
    std::vector<double> out;
    for (const auto& p : pieces_)
        if (p.upper != kInf) out.push_back(p.upper);
    return out;
}

PiecewisePower PiecewisePower::ratio(const ScaleFunction& num,
                                     const ScaleFunction& den, double extra) {
    std::vector<double> breaks;
    for (const auto& s : num.segments())
        if (s.r_max != kInf) breaks.push_back(s.r_max);
    for (const auto& s : den.segments())
        if (s.r_max != kInf) breaks.push_back(s.r_max);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    breaks.push_back(kInf);

    std::vector<PowerPiece> out;
    double prev = 0.0;
    for (double b : breaks) {
        const double mid = (b == kInf) ? prev * 2.0 + 1.0 : 0.5 * (prev + b);
        const std::size_t in = num.segment_at(mid);
        const std::size_t id = den.segment_at(mid);
        const double coeff = num.coefficient(in) / den.coefficient(id);
        const double expo = num.segments()[in].beta - den.segments()[id].beta + extra;
        if (!out.empty() && out.back().expo == expo && out.back().coeff == coeff)
            out.back().upper = b;
        else
            out.push_back(PowerPiece{b, coeff, expo});
        prev = b;
    }
    return PiecewisePower(std::move(out));
}

PiecewisePower PiecewisePower::reciprocal(const ScaleFunction& f, double extra) {
    std::vector<PowerPiece> out;
    for (std::size_t i = 0; i < f.segment_count(); ++i)
        out.push_back(PowerPiece{f.segments()[i].r_max, 1.0 / f.coefficient(i),
                                 extra - f.segments()[i].beta});
    return PiecewisePower(std::move(out));
}

}  // namespace subdiff
