#include "subdiff/mc_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

namespace subdiff::mc {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// 97.5% Student t quantiles for df = 1..30; normal beyond.
double t_quantile_975(int df) {
    static const double table[30] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (df < 1) return 12.706;
    if (df <= 30) return table[df - 1];
    return 1.96;
}

constexpr std::int64_t kExplicitAdvance = 1024;   // explicit steps below this
constexpr std::int64_t kStepClamp = (std::int64_t)4e15;
constexpr std::int64_t kTickCap = 10'000'000;
constexpr std::int64_t kStepCap = 1'000'000'000;  // diffusion per-path guard
constexpr std::int64_t kGasketBudget = 200'000'000;

struct LatticeWalk {
    int n = 1;
    std::array<std::int64_t, 3> x{};

    double dist() const {
        std::int64_t m = 0;
        for (int i = 0; i < n; ++i) m = std::max<std::int64_t>(m, std::llabs(x[i]));
        return (double)m;
    }
    void step(std::mt19937_64& rng) {
        std::uniform_int_distribution<int> u(0, 2 * n - 1);
        const int k = u(rng);
        x[k >> 1] += (k & 1) ? 1 : -1;
    }
    // Law-exact bulk advance: steps split multinomially over axes, each axis
    // displacement 2 Binomial(m, 1/2) - m.
    void advance(std::int64_t m, std::mt19937_64& rng) {
        if (m <= 0) return;
        if (m <= kExplicitAdvance) {
            for (std::int64_t i = 0; i < m; ++i) step(rng);
            return;
        }
        std::int64_t rem = m;
        for (int a = 0; a < n; ++a) {
            std::int64_t ma = rem;
            if (a + 1 < n) {
                std::binomial_distribution<std::int64_t> split(rem, 1.0 / (n - a));
                ma = split(rng);
            }
            rem -= ma;
            std::binomial_distribution<std::int64_t> up(ma, 0.5);
            x[a] += 2 * up(rng) - ma;
        }
    }
};

struct GasketWalk {
    const WalkGraph* g = nullptr;
    std::size_t center = 0;
    std::size_t v = 0;

    double dist() const { return std::sqrt((double)g->dist2(v, center)); }
    void step(std::mt19937_64& rng) {
        const auto& nb = g->adjacency()[v];
        std::uniform_int_distribution<std::size_t> u(0, nb.size() - 1);
        v = (std::size_t)nb[u(rng)];
    }
};

void validate_radii(const WalkGraph& graph, std::size_t center,
                    std::span<const double> radii) {
    if (radii.empty()) throw std::invalid_argument("exit_time: empty radius list");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0))
            throw std::invalid_argument("exit_time: radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw std::invalid_argument("exit_time: radii must increase");
    }
    if (graph.kind() == WalkGraph::Kind::Gasket) {
        if (center >= graph.vertex_count())
            throw std::invalid_argument("exit_time: center out of range");
        const double rmax = radii.back();
        if (rmax > 0.5 * graph.side())
            throw std::invalid_argument("exit_time: radius exceeds half the graph side");
        if (graph.corner_distance(center) < rmax)
            throw std::invalid_argument(
                "exit_time: center closer to a corner than the largest radius");
    }
}

void finalize_estimate(ExitTimeEstimate& est) {
    std::vector<double> xs, ys, ws;
    est.insufficient = false;
    for (std::size_t i = 0; i < est.radii.size(); ++i) {
        const double rel = (est.mean_exit[i] > 0.0)
                               ? est.std_error[i] / est.mean_exit[i]
                               : 1.0;
        if (rel > 0.10) est.insufficient = true;
        xs.push_back(est.radii[i]);
        ys.push_back(est.mean_exit[i]);
        ws.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1e12);
    }
    if (xs.size() >= 3) {
        const FitResult fit = fit_exponent(xs, ys, ws);
        est.fitted_exponent = fit.exponent;
        est.ci_lo = fit.ci_lo;
        est.ci_hi = fit.ci_hi;
    } else {
        est.fitted_exponent = est.ci_lo = est.ci_hi =
            std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ULL);
    s = mix64(s ^ (a + 0x9E3779B97F4A7C15ULL));
    s = mix64(s ^ (b + 0xD1B54A32D192ED03ULL));
    return std::mt19937_64(s);
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve((std::size_t)workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = (std::size_t)w; i < n; i += (std::size_t)workers)
                    fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

FitResult fit_exponent(std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> weights) {
    const std::size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("fit_exponent: at least 3 points required");
    if (ys.size() != n) throw std::invalid_argument("fit_exponent: size mismatch");
    if (!weights.empty() && weights.size() != n)
        throw std::invalid_argument("fit_exponent: weight size mismatch");

    std::vector<double> x(n), y(n), w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_exponent: inputs must be positive");
        x[i] = std::log(xs[i]);
        y[i] = std::log(ys[i]);
        if (!weights.empty()) {
            if (!(weights[i] > 0.0))
                throw std::invalid_argument("fit_exponent: weights must be positive");
            w[i] = weights[i];
        }
    }

    double W = 0, xbar = 0, ybar = 0;
    for (std::size_t i = 0; i < n; ++i) {
        W += w[i];
        xbar += w[i] * x[i];
        ybar += w[i] * y[i];
    }
    xbar /= W;
    ybar /= W;

    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("fit_exponent: degenerate abscissae");

    FitResult fit;
    fit.exponent = sxy / sxx;
    fit.intercept = ybar - fit.exponent * xbar;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.exponent * x[i]);
        rss += w[i] * r * r;
    }
    const double sigma2 = rss / (double)(n - 2);
    const double se = std::sqrt(std::max(sigma2, 0.0) / sxx);
    const double tq = t_quantile_975((int)n - 2);
    fit.ci_lo = fit.exponent - tq * se;
    fit.ci_hi = fit.exponent + tq * se;
    fit.valid = true;
    return fit;
}

ExitTimeEstimate exit_time_diffusion(const WalkGraph& graph, std::size_t center,
                                     std::span<const double> radii,
                                     int paths_per_radius, std::uint64_t seed,
                                     int workers) {
    validate_radii(graph, center, radii);
    if (paths_per_radius < 2)
        throw std::invalid_argument("exit_time_diffusion: need at least 2 paths");

    ExitTimeEstimate est;
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        const double r = radii[ri];
        std::vector<double> tau((std::size_t)paths_per_radius, 0.0);
        std::vector<char> cens((std::size_t)paths_per_radius, 0);
        parallel_for((std::size_t)paths_per_radius, workers, [&](std::size_t p) {
            std::mt19937_64 rng = path_rng(seed, ri, p);
            std::int64_t steps = 0;
            if (graph.kind() == WalkGraph::Kind::Lattice) {
                LatticeWalk walk;
                walk.n = graph.dim();
                while (walk.dist() < r && steps < kStepCap) {
                    walk.step(rng);
                    ++steps;
                }
            } else {
                GasketWalk walk{&graph, center, center};
                const double r2 = r * r;
                while ((double)graph.dist2(walk.v, center) < r2 && steps < kStepCap) {
                    walk.step(rng);
                    ++steps;
                }
            }
            tau[p] = (double)steps;
            cens[p] = (steps >= kStepCap) ? 1 : 0;
        });

        double sum = 0, sum2 = 0;
        std::int64_t kept = 0, censored = 0;
        for (std::size_t p = 0; p < tau.size(); ++p) {
            if (cens[p]) {
                ++censored;
                continue;
            }
            sum += tau[p];
            sum2 += tau[p] * tau[p];
            ++kept;
        }
        const double mean = (kept > 0) ? sum / (double)kept : 0.0;
        const double var =
            (kept > 1) ? std::max(0.0, (sum2 - (double)kept * mean * mean) /
                                           (double)(kept - 1))
                       : 0.0;
        est.radii.push_back(r);
        est.mean_exit.push_back(mean);
        est.std_error.push_back(kept > 0 ? std::sqrt(var / (double)kept) : 0.0);
        est.paths.push_back(kept);
        est.censored.push_back(censored);
    }
    finalize_estimate(est);
    return est;
}

ExitTimeEstimate exit_time_subordinated(const WalkGraph& graph, const LevyMeasure& nu,
                                        const SamplerConfig& config, std::size_t center,
                                        std::span<const double> radii,
                                        int paths_per_radius, std::uint64_t seed,
                                        int workers) {
    validate_radii(graph, center, radii);
    if (paths_per_radius < 2)
        throw std::invalid_argument("exit_time_subordinated: need at least 2 paths");
    nu.require_usable("exit_time_subordinated");
    const SubordinatorSampler sampler(nu, config.epsilon);

    ExitTimeEstimate est;
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        const double r = radii[ri];
        std::vector<double> tau((std::size_t)paths_per_radius, 0.0);
        std::vector<char> cens((std::size_t)paths_per_radius, 0);
        parallel_for((std::size_t)paths_per_radius, workers, [&](std::size_t p) {
            std::mt19937_64 rng = path_rng(seed, 0x100 + ri, p);
            double clock = 0.0;
            std::int64_t done = 0, ticks = 0, budget = 0;
            bool censored = false;

            if (graph.kind() == WalkGraph::Kind::Lattice) {
                LatticeWalk walk;
                walk.n = graph.dim();
                while (walk.dist() < r) {
                    if (ticks >= kTickCap) {
                        censored = true;
                        break;
                    }
                    ++ticks;
                    clock += sampler.increment(1.0, rng);
                    std::int64_t target =
                        (clock >= (double)kStepClamp) ? done + kStepClamp
                                                      : std::llround(clock);
                    if (target > done) {
                        walk.advance(target - done, rng);
                        done = target;
                    }
                }
            } else {
                GasketWalk walk{&graph, center, center};
                const double r2 = r * r;
                while ((double)graph.dist2(walk.v, center) < r2) {
                    if (ticks >= kTickCap || budget >= kGasketBudget) {
                        censored = true;
                        break;
                    }
                    ++ticks;
                    clock += sampler.increment(1.0, rng);
                    std::int64_t target =
                        (clock >= (double)kStepClamp) ? done + kStepClamp
                                                      : std::llround(clock);
                    for (; done < target && budget < kGasketBudget; ++done, ++budget)
                        walk.step(rng);
                }
            }
            tau[p] = (double)ticks;
            cens[p] = censored ? 1 : 0;
        });

        double sum = 0, sum2 = 0;
        std::int64_t kept = 0, censored = 0;
        for (std::size_t p = 0; p < tau.size(); ++p) {
            if (cens[p]) {
                ++censored;
                continue;
            }
            sum += tau[p];
            sum2 += tau[p] * tau[p];
            ++kept;
        }
        const double mean = (kept > 0) ? sum / (double)kept : 0.0;
        const double var =
            (kept > 1) ? std::max(0.0, (sum2 - (double)kept * mean * mean) /
                                           (double)(kept - 1))
                       : 0.0;
        est.radii.push_back(r);
        est.mean_exit.push_back(mean);
        est.std_error.push_back(kept > 0 ? std::sqrt(var / (double)kept) : 0.0);
        est.paths.push_back(kept);
        est.censored.push_back(censored);
    }
    finalize_estimate(est);
    return est;
}

JumpTailTable jump_tail_stats(const WalkGraph& graph, const LevyMeasure* nu,
                              const SamplerConfig& config, std::int64_t samples,
                              std::uint64_t seed, int workers) {
    if (samples < 100)
        throw std::invalid_argument("jump_tail_stats: need at least 100 samples");
    const SubordinatorSampler* sampler = nullptr;
    std::unique_ptr<SubordinatorSampler> owned;
    if (nu != nullptr) {
        nu->require_usable("jump_tail_stats");
        owned = std::make_unique<SubordinatorSampler>(*nu, config.epsilon);
        sampler = owned.get();
    }

    const std::size_t center =
        (graph.kind() == WalkGraph::Kind::Gasket) ? graph.default_center() : 0;

    std::vector<double> dist((std::size_t)samples, 0.0);
    parallel_for((std::size_t)samples, workers, [&](std::size_t i) {
        std::mt19937_64 rng = path_rng(seed, 0x7A11, i);
        std::int64_t m = 1;
        if (sampler != nullptr) {
            const double s = sampler->increment(1.0, rng);
            m = (s >= (double)kStepClamp) ? kStepClamp : std::llround(s);
        }
        if (graph.kind() == WalkGraph::Kind::Lattice) {
            LatticeWalk walk;
            walk.n = graph.dim();
            walk.advance(m, rng);
            dist[i] = walk.dist();
        } else {
            GasketWalk walk{&graph, center, center};
            const std::int64_t cap = std::min(m, kGasketBudget);
            for (std::int64_t k = 0; k < cap; ++k) walk.step(rng);
            dist[i] = walk.dist();
        }
    });

    JumpTailTable table;
    table.samples = samples;
    for (double d = 1.0; d <= 1e12; d *= 2.0) {
        std::int64_t count = 0;
        for (double v : dist)
            if (v > d) ++count;
        if (count == 0 && !table.d.empty()) break;
        table.d.push_back(d);
        table.count.push_back(count);
        table.tail.push_back((double)count / (double)samples);
        if (count == 0) break;
    }

    // Fit the power-law window: past the bulk of the distribution but with
    // enough counts for a stable log estimate.
    std::vector<double> xs, ys, ws;
    for (std::size_t i = 0; i < table.d.size(); ++i) {
        const std::int64_t c = table.count[i];
        const double p = table.tail[i];
        if (c < 50 || p > 0.2) continue;
        xs.push_back(table.d[i]);
        ys.push_back(p);
        ws.push_back((double)c / (1.0 - p));  // inverse variance of log p-hat
    }
    if (xs.size() >= 3) table.slope = fit_exponent(xs, ys, ws);
    return table;
}

}  // namespace subdiff::mc
