#include <doctest.h>

#include <cmath>
#include <random>

#include "subdiff/mc_lab.hpp"

using namespace subdiff;
using namespace subdiff::mc;

TEST_SUITE("mc_lab") {

TEST_CASE("gasket construction matches the closed-form counts") {
    CHECK(WalkGraph::gasket(0).vertex_count() == 3);
    CHECK(WalkGraph::gasket(1).vertex_count() == 6);
    CHECK(WalkGraph::gasket(2).vertex_count() == 15);
    // 3 (3^L + 1) / 2
    for (int L = 3; L <= 6; ++L) {
        std::size_t p = 1;
        for (int i = 0; i < L; ++i) p *= 3;
        CHECK(WalkGraph::gasket(L).vertex_count() == 3 * (p + 1) / 2);
    }

    const WalkGraph g3 = WalkGraph::gasket(3);
    int deg2 = 0;
    for (std::size_t v = 0; v < g3.vertex_count(); ++v) {
        CHECK(g3.degree(v) <= 4);
        if (g3.degree(v) == 2) ++deg2;
    }
    CHECK(deg2 == 3);  // exactly the three extreme corners

    CHECK(WalkGraph::lattice(2).degree(0) == 4);
    CHECK(WalkGraph::lattice(3).degree(0) == 6);
    CHECK_THROWS_AS(WalkGraph::gasket(10), std::invalid_argument);
    CHECK_THROWS_AS(WalkGraph::lattice(4), std::invalid_argument);
}

TEST_CASE("gasket default center sits away from the corners") {
    const WalkGraph g = WalkGraph::gasket(6);
    const std::size_t c = g.default_center();
    CHECK(g.lattice_coords()[c][0] == 32);
    CHECK(g.lattice_coords()[c][1] == 0);
    CHECK(g.corner_distance(c) == doctest::Approx(32.0));
    CHECK(g.degree(c) == 4);
}

TEST_CASE("fit_exponent exact and prefactor-invariant") {
    std::vector<double> xs{1, 2, 4, 8, 16, 32};
    std::vector<double> y2, y15;
    for (double x : xs) {
        y2.push_back(x * x);
        y15.push_back(5.0 * std::pow(x, 1.5));
    }
    const FitResult f2 = fit_exponent(xs, y2);
    CHECK(f2.exponent == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f2.ci_hi - f2.ci_lo == doctest::Approx(0.0).epsilon(1e-10));
    const FitResult f15 = fit_exponent(xs, y15);
    CHECK(f15.exponent == doctest::Approx(1.5).epsilon(1e-12));

    std::vector<double> flat{1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS(fit_exponent(flat, y2), std::invalid_argument);
    CHECK_THROWS_AS(fit_exponent(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("fit_exponent CI coverage on a synthetic battery") {
    std::vector<double> xs;
    for (int i = 0; i < 10; ++i) xs.push_back(std::pow(2.0, i * 0.7));
    int covered = 0;
    for (int seedi = 0; seedi < 100; ++seedi) {
        std::mt19937_64 rng(50000 + seedi);
        std::normal_distribution<double> noise(0.0, 0.1);
        std::vector<double> ys;
        for (double x : xs) ys.push_back(x * x * std::exp(noise(rng)));
        const FitResult f = fit_exponent(xs, ys);
        if (f.ci_lo <= 2.0 && 2.0 <= f.ci_hi) ++covered;
    }
    CHECK(covered >= 93);
}

TEST_CASE("Z^1 gambler's ruin identity") {
    const WalkGraph g = WalkGraph::lattice(1);
    std::vector<double> radii{10.0};
    const ExitTimeEstimate est = exit_time_diffusion(g, 0, radii, 4000, 1234, 2);
    // exit at the first step with |x| >= r: expected time exactly r^2
    const double target = 100.0;
    CHECK(std::abs(est.mean_exit[0] - target) <= 3.0 * est.std_error[0]);
    CHECK(est.censored[0] == 0);
}

TEST_CASE("Z^2 diffusive exponent") {
    const WalkGraph g = WalkGraph::lattice(2);
    std::vector<double> radii{4, 8, 16, 32};
    const ExitTimeEstimate est = exit_time_diffusion(g, 0, radii, 3000, 99, 2);
    CHECK(std::abs(est.fitted_exponent - 2.0) <= 0.15);
    CHECK(est.ci_lo <= est.fitted_exponent);
    CHECK(est.fitted_exponent <= est.ci_hi);
    for (std::size_t i = 1; i < est.mean_exit.size(); ++i)
        CHECK(est.mean_exit[i] > est.mean_exit[i - 1]);
    CHECK(!est.insufficient);
}

TEST_CASE("gasket diffusive exponent near log5/log2") {
    const WalkGraph g = WalkGraph::gasket(6);
    std::vector<double> radii{4, 8, 16};
    const ExitTimeEstimate est =
        exit_time_diffusion(g, g.default_center(), radii, 3000, 7, 2);
    const double dw = std::log(5.0) / std::log(2.0);
    CHECK(std::abs(est.fitted_exponent - dw) <= 0.2);
}

TEST_CASE("subordinated exit exponent tracks the jump index on Z^1") {
    const WalkGraph g = WalkGraph::lattice(1);
    const LevyMeasure nu(ScaleFunction::power(2.0), ScaleFunction::power(1.0));
    SamplerConfig cfg;
    cfg.epsilon = 0.01;
    std::vector<double> radii{8, 16, 32, 64};
    const ExitTimeEstimate est =
        exit_time_subordinated(g, nu, cfg, 0, radii, 2500, 2024, 2);
    CHECK(std::abs(est.fitted_exponent - 1.0) <= 0.2);

    // jump walk leaves small balls no slower than the diffusion, at the
    // exponent level
    const ExitTimeEstimate diff = exit_time_diffusion(g, 0, radii, 2500, 2024, 2);
    CHECK(est.fitted_exponent <= diff.fitted_exponent);
}

TEST_CASE("jump tail slope matches the stable index on Z^1") {
    const WalkGraph g = WalkGraph::lattice(1);
    const LevyMeasure nu(ScaleFunction::power(2.0), ScaleFunction::power(1.0));
    SamplerConfig cfg;
    cfg.epsilon = 0.01;
    const JumpTailTable t = jump_tail_stats(g, &nu, cfg, 30000, 555, 2);
    REQUIRE(t.slope.valid);
    CHECK(std::abs(t.slope.exponent - (-1.0)) <= 0.15);
}

TEST_CASE("identity clock control never moves beyond one edge") {
    const WalkGraph g = WalkGraph::lattice(1);
    SamplerConfig cfg;
    const JumpTailTable t = jump_tail_stats(g, nullptr, cfg, 5000, 9, 2);
    REQUIRE(!t.d.empty());
    CHECK(t.d[0] == 1.0);
    CHECK(t.tail[0] == 0.0);
    CHECK(!t.slope.valid);
}

TEST_CASE("identical seeds give identical estimates for any worker count") {
    const WalkGraph g = WalkGraph::lattice(2);
    std::vector<double> radii{4, 8, 16};
    const ExitTimeEstimate a = exit_time_diffusion(g, 0, radii, 500, 31415, 1);
    const ExitTimeEstimate b = exit_time_diffusion(g, 0, radii, 500, 31415, 4);
    CHECK(a.mean_exit == b.mean_exit);
    CHECK(a.std_error == b.std_error);
    CHECK(a.fitted_exponent == b.fitted_exponent);

    const LevyMeasure nu(ScaleFunction::power(2.0), ScaleFunction::power(1.5));
    SamplerConfig cfg;
    const JumpTailTable ta = jump_tail_stats(g, &nu, cfg, 4000, 9090, 1);
    const JumpTailTable tb = jump_tail_stats(g, &nu, cfg, 4000, 9090, 3);
    CHECK(ta.tail == tb.tail);
    CHECK(ta.count == tb.count);
}

TEST_CASE("subordinated runs refuse a divergent criterion") {
    const WalkGraph g = WalkGraph::lattice(1);
    const LevyMeasure bad(ScaleFunction::power(2.0), ScaleFunction::power(2.0));
    SamplerConfig cfg;
    std::vector<double> radii{4, 8, 16};
    CHECK_THROWS_AS(exit_time_subordinated(g, bad, cfg, 0, radii, 100, 1, 1),
                    RefusalError);
    CHECK_THROWS_AS(jump_tail_stats(g, &bad, cfg, 1000, 1, 1), RefusalError);
}

TEST_CASE("precondition checks") {
    const WalkGraph g = WalkGraph::gasket(4);  // side 16
    std::vector<double> too_big{4, 8, 16};
    CHECK_THROWS_AS(exit_time_diffusion(g, g.default_center(), too_big, 100, 1, 1),
                    std::invalid_argument);
    std::vector<double> not_incr{8, 8};
    CHECK_THROWS_AS(exit_time_diffusion(g, g.default_center(), not_incr, 100, 1, 1),
                    std::invalid_argument);
    // corner start: ball of radius 6 sticks out past the corner
    std::vector<double> radii{6};
    CHECK_THROWS_AS(exit_time_diffusion(g, 0, radii, 100, 1, 1), std::invalid_argument);
}

}  // TEST_SUITE
