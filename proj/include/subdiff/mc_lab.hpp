#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "subdiff/subordination.hpp"
#include "subdiff/walk_graph.hpp"

namespace subdiff::mc {

/// Weighted least squares on (log x, log y); CI at 95% from residual
/// variance (Student t on n-2 degrees of freedom).
struct FitResult {
    double exponent = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double intercept = 0.0;
    bool valid = false;
};

FitResult fit_exponent(std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> weights = {});

struct ExitTimeEstimate {
    std::vector<double> radii;
    std::vector<double> mean_exit;
    std::vector<double> std_error;
    std::vector<std::int64_t> paths;
    std::vector<std::int64_t> censored;
    double fitted_exponent = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    bool insufficient = false;  // some stderr/mean above 10%
};

/// Simple-random-walk exit times from balls around `center` (graph walks exit
/// when the distance first reaches the radius). Lattices use the l_inf ball
/// around the origin; gasket balls use the Euclidean embedding metric.
ExitTimeEstimate exit_time_diffusion(const WalkGraph& graph, std::size_t center,
                                     std::span<const double> radii,
                                     int paths_per_radius, std::uint64_t seed,
                                     int workers = 1);

/// Exit times of the subordinated walk Y_k = X_{round(S(k))}, S sampled at
/// unit ticks in walk-step units; exit time is counted in ticks.
ExitTimeEstimate exit_time_subordinated(const WalkGraph& graph, const LevyMeasure& nu,
                                        const SamplerConfig& config, std::size_t center,
                                        std::span<const double> radii,
                                        int paths_per_radius, std::uint64_t seed,
                                        int workers = 1);

struct JumpTailTable {
    std::vector<double> d;
    std::vector<double> tail;  // P(|Y_1 - Y_0| > d)
    std::vector<std::int64_t> count;
    std::int64_t samples = 0;
    FitResult slope;
};

/// One-tick displacement tail of the subordinated walk over a dyadic grid of
/// distances. nu == nullptr runs the identity-clock control (one step per
/// tick), whose displacement is always exactly one edge.
JumpTailTable jump_tail_stats(const WalkGraph& graph, const LevyMeasure* nu,
                              const SamplerConfig& config, std::int64_t samples,
                              std::uint64_t seed, int workers = 1);

/// Deterministic per-stream rng: mixing (seed, a, b) yields the same stream
/// regardless of worker count or scheduling.
std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Static stride partition; results must be written to per-index slots.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace subdiff::mc
