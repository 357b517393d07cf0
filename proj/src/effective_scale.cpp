#include "subdiff/effective_scale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "subdiff/subordination.hpp"

namespace subdiff {

EffectiveScale::EffectiveScale(ScaleFunction psi_c, ScaleFunction psi_j)
    : psi_c_(std::move(psi_c)),
      psi_j_(std::move(psi_j)),
      integrand_(PiecewisePower::ratio(psi_c_, psi_j_, -1.0)) {
    if (criterion_integral(psi_c_, psi_j_).is_divergent())
        throw RefusalError("effective scale undefined (I(r) infinite for every r)");
}

double EffectiveScale::integral(double r) const {
    if (!(r > 0.0)) throw std::invalid_argument("EffectiveScale: r must be positive");
    return integrand_.integral_zero_to(r);
}

double EffectiveScale::operator()(double r) const { return psi_c_(r) / integral(r); }

double effective_scale_eval(const ScaleFunction& psi_c, const ScaleFunction& psi_j,
                            double r) {
    return EffectiveScale(psi_c, psi_j)(r);
}

ScaleBounds certify_effective_bounds(const ScaleFunction& psi_c,
                                     const ScaleFunction& psi_j) {
    const EffectiveScale hat(psi_c, psi_j);

    std::vector<double> grid, values;
    for (int k = -15; k <= 15; ++k) {
        const double r = std::ldexp(1.0, k);
        const double v = hat(r);
        if (!std::isfinite(v) || !(v > 0.0)) {
            std::ostringstream msg;
            msg << "effective scale not positive-finite at r=" << r;
            throw CertificationError(msg.str());
        }
        if (!values.empty() && !(v > values.back())) {
            std::ostringstream msg;
            msg << "effective scale fails to increase at r=" << r;
            throw CertificationError(msg.str());
        }
        grid.push_back(r);
        values.push_back(v);
    }

    double lo = kInf, hi = 0.0;
    for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = a + 1; b < grid.size(); ++b) {
            const double slope = std::log(values[b] / values[a]) /
                                 std::log(grid[b] / grid[a]);
            lo = std::min(lo, slope);
            hi = std::max(hi, slope);
        }
    return ScaleBounds{1.0, lo, hi};
}

namespace {

// The log-log slopes of psi_hat/psi_j and psi_c/psi_j keep a constant sign
// between breakpoints of the two scale functions, so their grid extrema are
// exact once the breakpoints (and the unit radius) join the grid.
std::vector<double> augment_grid(const std::vector<double>& base,
                                 const ScaleFunction& psi_c,
                                 const ScaleFunction& psi_j) {
    std::vector<double> grid = base;
    auto add = [&](double r) {
        if (r > base.front() && r < base.back()) grid.push_back(r);
    };
    add(1.0);
    for (const auto& s : psi_c.segments())
        if (s.r_max != kInf) add(s.r_max);
    for (const auto& s : psi_j.segments())
        if (s.r_max != kInf) add(s.r_max);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

CorollaryConstants grid_constants(const EffectiveScale& hat,
                                  const std::vector<double>& grid) {
    const ScaleFunction& psi_c = hat.psi_c();
    const ScaleFunction& psi_j = hat.psi_j();

    std::vector<double> hats(grid.size()), cs(grid.size()), js(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        hats[i] = hat(grid[i]);
        cs[i] = psi_c(grid[i]);
        js[i] = psi_j(grid[i]);
    }

    CorollaryConstants out{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, false};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.cor1 = std::max(out.cor1, hats[i] / js[i]);
        if (grid[i] <= 1.0) {
            out.cor2 = std::max(out.cor2, cs[i] / js[i]);
            out.cor4b = std::max(out.cor4b, cs[i] / hats[i]);
        }
        if (grid[i] >= 1.0) out.cor4a = std::max(out.cor4a, hats[i] / cs[i]);
        for (std::size_t j = i; j < grid.size(); ++j)
            out.cor3 = std::max(out.cor3, (hats[j] / hats[i]) * (cs[i] / cs[j]));
    }
    return out;
}

}  // namespace

CorollaryConstants verify_corollary_inequalities(const ScaleFunction& psi_c,
                                                 const ScaleFunction& psi_j,
                                                 std::span<const double> r_grid) {
    const EffectiveScale hat(psi_c, psi_j);

    if (r_grid.size() < 4)
        throw std::invalid_argument("verify_corollary_inequalities: grid too small");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > 0.0))
            throw std::invalid_argument("verify_corollary_inequalities: grid must be positive");
        if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
            throw std::invalid_argument("verify_corollary_inequalities: grid must increase");
    }
    if (!(r_grid.back() / r_grid.front() >= 0.999e6))
        throw std::invalid_argument(
            "verify_corollary_inequalities: grid must span >= 6 decades");
    if (!(r_grid.front() < 1.0 && r_grid.back() > 1.0))
        throw std::invalid_argument(
            "verify_corollary_inequalities: grid must cover radii strictly on both "
            "sides of 1");

    std::vector<double> base(r_grid.begin(), r_grid.end());
    std::vector<double> dense;
    for (std::size_t i = 0; i < base.size(); ++i) {
        dense.push_back(base[i]);
        if (i + 1 < base.size()) dense.push_back(std::sqrt(base[i] * base[i + 1]));
    }

    CorollaryConstants coarse = grid_constants(hat, augment_grid(base, psi_c, psi_j));
    CorollaryConstants fine = grid_constants(hat, augment_grid(dense, psi_c, psi_j));

    const double vals_coarse[] = {coarse.cor1, coarse.cor2, coarse.cor3, coarse.cor4a,
                                  coarse.cor4b};
    const double vals_fine[] = {fine.cor1, fine.cor2, fine.cor3, fine.cor4a, fine.cor4b};
    double drift = 0.0;
    bool finite = true;
    for (int i = 0; i < 5; ++i) {
        finite = finite && std::isfinite(vals_fine[i]) && vals_fine[i] > 0.0;
        if (finite)
            drift = std::max(drift, std::abs(vals_fine[i] - vals_coarse[i]) / vals_fine[i]);
    }

    fine.max_refinement_drift = drift;
    fine.pass = finite && drift < 0.05;
    return fine;
}

}  // namespace subdiff
