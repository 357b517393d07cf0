// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here, not configurable.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "subdiff/cli.hpp"
#include "subdiff/effective_scale.hpp"
#include "subdiff/json_io.hpp"
#include "subdiff/mc_lab.hpp"
#include "test_support.hpp"

using namespace subdiff;
namespace fs = std::filesystem;

namespace {

struct Runner {
    int failures = 0;
    int index = 0;

    void run(const std::string& name, const std::function<std::string()>& fn) {
        ++index;
        std::string detail;
        bool ok = true;
        try {
            detail = fn();
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        if (!ok || detail.rfind("FAIL", 0) == 0) {
            ++failures;
            std::printf("[FAIL] %d: %s — %s\n", index, name.c_str(), detail.c_str());
        } else {
            std::printf("[PASS] %d: %s — %s\n", index, name.c_str(), detail.c_str());
        }
        std::fflush(stdout);
    }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

double stable_phi(double rho, double lambda) {
    return std::tgamma(1.0 - rho) / rho * std::pow(lambda, rho);
}

double stable_jump_kernel(int n, double alpha, double d) {
    return std::pow(2.0, alpha - 1.0) * std::pow(M_PI, -0.5 * n) *
           std::tgamma(0.5 * (n + alpha)) * std::pow(d, -(double)n - alpha);
}

nlohmann::json power_json(double beta) {
    using nlohmann::json;
    return json{{"c0", 1.0},
                {"segments", json::array({json{{"r_max", "inf"}, {"beta", beta}}})}};
}

std::string criterion_1() {
    const ScaleFunction r2 = ScaleFunction::power(2.0);
    double worst = 0.0;
    for (double alpha : {0.5, 1.0, 1.5}) {
        const LevyMeasure nu(r2, ScaleFunction::power(alpha));
        if (nu.density().pieces().size() != 1) return "FAIL: density not a single power";
        const auto& piece = nu.density().pieces()[0];
        if (std::abs(piece.coeff - 1.0) > 1e-12 ||
            std::abs(piece.expo - (-1.0 - 0.5 * alpha)) > 1e-12)
            return fmt("FAIL: density != t^{-1-%g/2} symbolically", alpha);
        for (int i = 0; i <= 48; ++i) {
            const double lambda = std::pow(10.0, -3.0 + 6.0 * i / 48.0);
            const double expect = stable_phi(0.5 * alpha, lambda);
            const double got = laplace_exponent(nu, lambda);
            worst = std::max(worst, std::abs(got - expect) / expect);
        }
    }
    if (worst > 1e-6) return fmt("FAIL: worst relative error %.3e > 1e-6", worst);
    return fmt("density symbolic, Laplace exponent worst rel err %.2e (tol 1e-6)", worst);
}

std::string criterion_2() {
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const HeatKernelModel g = HeatKernelModel::exact_gaussian(n);
        for (double alpha : {0.5, 1.0, 1.5}) {
            const LevyMeasure nu(ScaleFunction::power(2.0), ScaleFunction::power(alpha));
            for (int i = 0; i <= 16; ++i) {
                const double d = std::pow(10.0, -2.0 + 4.0 * i / 16.0);
                const double expect = stable_jump_kernel(n, alpha, d);
                const double got = jump_kernel(g, nu, d);
                worst = std::max(worst, std::abs(got - expect) / expect);
            }
        }
    }
    if (worst > 1e-5) return fmt("FAIL: worst relative error %.3e > 1e-5", worst);
    return fmt("n in {1,2,3}, alpha in {0.5,1,1.5}, worst rel err %.2e (tol 1e-5)", worst);
}

std::string criterion_3() {
    std::mt19937_64 rng(20250809);
    int disagreements = 0, finite_count = 0;
    double K = 1.0;
    for (int rep = 0; rep < 500; ++rep) {
        const ScaleFunction pc = testsup::random_scale(rng);
        const ScaleFunction pj = testsup::random_scale(rng);
        const bool rule = pc.inner_beta() > pj.inner_beta();
        const CriterionValue a = criterion_integral(pc, pj);
        const CriterionValue b = criterion_equivalent(pc, pj);
        if (a.is_finite() != rule || b.is_finite() != rule) ++disagreements;
        if (a.is_finite() && b.is_finite()) {
            ++finite_count;
            const double ratio = a.value() / b.value();
            if (!std::isfinite(ratio) || !(ratio > 0.0)) ++disagreements;
            K = std::max(K, std::max(ratio, 1.0 / ratio));
        }
    }
    if (disagreements > 0) return fmt("FAIL: %d disagreements", disagreements);
    return fmt("500 pairs, 0 disagreements, %d finite, value-ratio bound K = %.3g",
               finite_count, K);
}

std::string criterion_4() {
    using nlohmann::json;
    const fs::path base = fs::temp_directory_path() / "subdiff_acceptance_refusal";
    fs::remove_all(base);
    fs::create_directories(base);

    json cfg;
    cfg["psi_c"] = power_json(2.0);
    cfg["psi_j"] = power_json(2.5);  // inner exponent above psi_c: divergent
    cfg["model"] = json{{"kind", "gaussian"}, {"n", 1}};
    cfg["d_grid"] = json::array({0.01, 0.1, 1.0, 10.0, 100.0});
    cfg["r_grid"] = json::array({1e-3, 1e-2, 0.1, 1.0, 10.0, 1e2, 1e3, 1e4});
    cfg["lambda_grid"] = json::array({0.5, 1.0, 2.0});
    cfg["sampler"] = json{{"epsilon", 0.01}, {"seed", 1}, {"paths", 100}};
    cfg["simulate"] = json{{"graph", json{{"kind", "lattice"}, {"n", 1}}},
                           {"mode", "subordinated"},
                           {"radii", json::array({4.0, 8.0, 16.0})},
                           {"paths", 100}};

    std::ostringstream detail;
    for (const std::string cmd : {"subordinator", "jumpkernel", "effscale", "simulate"}) {
        cli::Options opt;
        opt.out_dir = (base / cmd).string();
        const int rc = cli::run_command(cmd, cfg, opt);
        if (rc != 2) return fmt("FAIL: %s exited %d, expected 2", cmd.c_str(), rc);
        detail << cmd << "=2 ";
    }
    fs::remove_all(base);
    return detail.str() + "(all refusals honored)";
}

std::string criterion_5() {
    const ScaleFunction r2 = ScaleFunction::power(2.0);
    double worst = 0.0;
    for (double alpha : {0.5, 1.0, 1.5}) {
        const EffectiveScale hat(r2, ScaleFunction::power(alpha));
        for (int i = 0; i <= 24; ++i) {
            const double r = std::pow(10.0, -3.0 + 6.0 * i / 24.0);
            const double expect = (2.0 - alpha) * std::pow(r, alpha);
            worst = std::max(worst, std::abs(hat(r) - expect) / expect);
        }
    }
    if (worst > 1e-9) return fmt("FAIL: stable psi_hat rel err %.3e > 1e-9", worst);

    const EffectiveScale mixed(r2, ScaleFunction(1.0, {{1.0, 1.5}, {kInf, 3.0}}));
    const double expect_mixed = 1e4 / (3.0 - 0.01);
    const double err_mixed = std::abs(mixed(100.0) - expect_mixed) / expect_mixed;
    if (err_mixed > 1e-9) return fmt("FAIL: mixed psi_hat(100) rel err %.3e", err_mixed);

    // 10-case battery: constants finite, refinement-stable below 5%
    std::vector<std::pair<ScaleFunction, ScaleFunction>> battery;
    battery.emplace_back(r2, ScaleFunction::power(0.5));
    battery.emplace_back(r2, ScaleFunction::power(1.0));
    battery.emplace_back(r2, ScaleFunction::power(1.5));
    battery.emplace_back(r2, ScaleFunction(1.0, {{1.0, 1.5}, {kInf, 3.0}}));
    battery.emplace_back(r2, ScaleFunction(1.0, {{1.0, 0.8}, {kInf, 2.2}}));
    battery.emplace_back(ScaleFunction::power(2.5), ScaleFunction::power(2.0));
    battery.emplace_back(ScaleFunction(1.0, {{1.0, 2.0}, {kInf, 2.5}}),
                         ScaleFunction(1.0, {{2.0, 1.2}, {kInf, 3.0}}));
    battery.emplace_back(ScaleFunction(2.0, {{0.5, 2.2}, {kInf, 2.0}}),
                         ScaleFunction(0.5, {{3.0, 1.0}, {kInf, 2.4}}));
    battery.emplace_back(ScaleFunction::power(3.0), ScaleFunction::power(2.0));
    battery.emplace_back(ScaleFunction(1.0, {{1.0, 2.0}, {10.0, 3.0}, {kInf, 2.0}}),
                         ScaleFunction(1.0, {{1.0, 1.5}, {kInf, 1.0}}));

    std::vector<double> grid;
    for (double r = 1e-3; r <= 1.0001e3; r *= std::pow(10.0, 0.25)) grid.push_back(r);
    double max_drift = 0.0;
    for (const auto& [pc, pj] : battery) {
        const CorollaryConstants c = verify_corollary_inequalities(pc, pj, grid);
        if (!c.pass) return "FAIL: battery case not refinement-stable";
        max_drift = std::max(max_drift, c.max_refinement_drift);
    }
    return fmt("stable chain err %.1e, mixed err %.1e, battery drift max %.2e (tol 5%%)",
               worst, err_mixed, max_drift);
}

std::string criterion_6() {
    const HeatKernelModel sg = HeatKernelModel::sub_gaussian(
        ScaleFunction::power(2.5), VolumeModel{2.0, 1.0}, 1.0, 1.0, 1.0, 0.3, 1.0);
    const LevyMeasure nu(ScaleFunction::power(2.5), ScaleFunction::power(2.0));
    std::vector<double> grid;
    for (double d = 1e-2; d <= 1.0001e2; d *= std::pow(10.0, 0.25)) grid.push_back(d);
    const ComparabilityReport rep =
        verify_jump_comparability(sg, nu, nu.psi_j(), sg.volume(), grid);
    if (!rep.pass)
        return fmt("FAIL: C_emp=%.3g slope=%.3g", rep.C_emp, rep.log_slope);
    return fmt("ratio in [%.4g, %.4g], C_emp=%.4g, |slope|=%.2e per decade (tol 0.05)",
               rep.ratio_min, rep.ratio_max, rep.C_emp, std::abs(rep.log_slope));
}

std::string criterion_7() {
    std::ostringstream detail;

    // Z^1 gambler's ruin: exact mean r^2
    {
        const WalkGraph g = WalkGraph::lattice(1);
        std::vector<double> radii{16.0};
        const mc::ExitTimeEstimate est =
            mc::exit_time_diffusion(g, 0, radii, 10000, 11, 2);
        const double target = 256.0;
        if (std::abs(est.mean_exit[0] - target) > 3.0 * est.std_error[0])
            return fmt("FAIL: Z1 mean %.2f vs %g (3se %.2f)", est.mean_exit[0], target,
                       3.0 * est.std_error[0]);
        detail << fmt("Z1 mean %.1f~%g(3se %.1f); ", est.mean_exit[0], target,
                      3.0 * est.std_error[0]);
    }
    // Z^2 diffusive exponent
    {
        const WalkGraph g = WalkGraph::lattice(2);
        std::vector<double> radii{8, 16, 32, 64};
        const mc::ExitTimeEstimate est =
            mc::exit_time_diffusion(g, 0, radii, 10000, 12, 2);
        if (std::abs(est.fitted_exponent - 2.0) > 0.15)
            return fmt("FAIL: Z2 exponent %.3f not within 2.0±0.15", est.fitted_exponent);
        detail << fmt("Z2 %.3f~2.0; ", est.fitted_exponent);
    }
    // Sierpinski level 8: walk dimension log5/log2
    {
        const WalkGraph g = WalkGraph::gasket(8);
        std::vector<double> radii{4, 8, 16, 32};
        const mc::ExitTimeEstimate est =
            mc::exit_time_diffusion(g, g.default_center(), radii, 10000, 13, 2);
        const double dw = std::log(5.0) / std::log(2.0);
        if (std::abs(est.fitted_exponent - dw) > 0.15)
            return fmt("FAIL: SG exponent %.3f not within %.3f±0.15",
                       est.fitted_exponent, dw);
        detail << fmt("SG8 %.3f~%.3f; ", est.fitted_exponent, dw);
    }
    // subordinated Z^1, alpha = 1
    {
        const WalkGraph g = WalkGraph::lattice(1);
        const LevyMeasure nu(ScaleFunction::power(2.0), ScaleFunction::power(1.0));
        SamplerConfig cfg;
        cfg.epsilon = 0.01;
        std::vector<double> radii{16, 32, 64, 128};
        const mc::ExitTimeEstimate est =
            mc::exit_time_subordinated(g, nu, cfg, 0, radii, 10000, 14, 2);
        if (std::abs(est.fitted_exponent - 1.0) > 0.2)
            return fmt("FAIL: subordinated exponent %.3f not within 1.0±0.2",
                       est.fitted_exponent);
        detail << fmt("sub-Z1 %.3f~1.0; ", est.fitted_exponent);
    }
    // mixed-regime chain: large radii look diffusive, matching psi_hat
    {
        const WalkGraph g = WalkGraph::lattice(1);
        const ScaleFunction psi_c = ScaleFunction::power(2.0);
        const ScaleFunction psi_j(1.0, {{1.0, 1.5}, {kInf, 3.0}});
        const LevyMeasure nu(psi_c, psi_j);
        SamplerConfig cfg;
        cfg.epsilon = 0.05;
        std::vector<double> radii{8, 16, 32, 64};
        const mc::ExitTimeEstimate est =
            mc::exit_time_subordinated(g, nu, cfg, 0, radii, 4000, 15, 2);
        if (std::abs(est.fitted_exponent - 2.0) > 0.25)
            return fmt("FAIL: mixed exponent %.3f not within 2.0±0.25",
                       est.fitted_exponent);
        const EffectiveScale hat(psi_c, psi_j);
        const double hat_slope =
            std::log(hat(64.0) / hat(8.0)) / std::log(8.0);
        if (std::abs(est.fitted_exponent - hat_slope) > 0.25)
            return fmt("FAIL: mixed exponent %.3f vs psi_hat slope %.3f",
                       est.fitted_exponent, hat_slope);
        detail << fmt("mixed %.3f~2.0 (psi_hat slope %.3f)", est.fitted_exponent,
                      hat_slope);
    }
    return detail.str();
}

std::string criterion_8() {
    const LevyMeasure nu(ScaleFunction::power(2.0), ScaleFunction::power(1.0));
    const SubordinatorSampler sampler(nu, 0.01);
    const int n = 100000;
    std::vector<double> s1((std::size_t)n);
    std::mt19937_64 rng(160);
    for (int i = 0; i < n; ++i) s1[i] = sampler.increment(1.0, rng);

    std::ostringstream detail;
    for (double lambda : {0.5, 1.0, 2.0}) {
        double acc = 0.0, acc2 = 0.0;
        for (double v : s1) {
            const double e = std::exp(-lambda * v);
            acc += e;
            acc2 += e * e;
        }
        const double emp = acc / n;
        const double sd = std::sqrt((acc2 / n - emp * emp) / (n - 1.0));
        const double expect = std::exp(-laplace_exponent_truncated(nu, 0.01, lambda));
        if (std::abs(emp - expect) > 3.0 * sd)
            return fmt("FAIL: lambda=%g empirical %.5f expected %.5f (3se %.5f)", lambda,
                       emp, expect, 3.0 * sd);
        detail << fmt("l=%g ok; ", lambda);
    }
    for (double lambda : {0.5, 1.0, 2.0}) {
        const double exact = laplace_exponent(nu, lambda);
        double prev = kInf;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const double gap =
                std::abs(laplace_exponent_truncated(nu, eps, lambda) - exact);
            if (!(gap < prev))
                return fmt("FAIL: eps-refinement not monotone at lambda=%g", lambda);
            prev = gap;
        }
    }
    return detail.str() + "eps-refinement monotone for eps in {1e-2,1e-3,1e-4}";
}

std::string criterion_9() {
    using nlohmann::json;
    json cfg;
    cfg["psi_c"] = power_json(2.0);
    cfg["psi_j"] = power_json(1.0);
    cfg["model"] = json{{"kind", "gaussian"}, {"n", 1}};
    cfg["d_grid"] = json::array({0.01, 0.1, 1.0, 10.0, 100.0});
    cfg["r_grid"] = json::array({1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 1e2, 1e3, 1e4});
    cfg["lambda_grid"] = json::array({0.5, 1.0, 2.0});
    cfg["sampler"] = json{{"epsilon", 0.01}, {"seed", 90}, {"paths", 2000}};
    cfg["simulate"] = json{{"graph", json{{"kind", "lattice"}, {"n", 1}}},
                           {"mode", "subordinated"},
                           {"radii", json::array({4.0, 8.0, 16.0})},
                           {"paths", 2000}};

    const fs::path base = fs::temp_directory_path() / "subdiff_acceptance_determinism";
    fs::remove_all(base);
    std::vector<std::string> dumps;
    for (int workers : {1, 4, 8}) {
        cli::Options opt;
        opt.out_dir = (base / ("w" + std::to_string(workers))).string();
        opt.workers = workers;
        const int rc = cli::run_command("report", cfg, opt);
        if (rc != 0) return fmt("FAIL: report exited %d under %d workers", rc, workers);
        std::ostringstream all;
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(opt.out_dir)) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f, std::ios::binary);
            all << f.filename().string() << "\n" << in.rdbuf() << "\n";
        }
        dumps.push_back(all.str());
    }
    fs::remove_all(base);
    if (dumps[0] != dumps[1] || dumps[0] != dumps[2])
        return "FAIL: artifacts differ across worker counts";
    return fmt("report artifacts byte-identical under 1, 4, 8 workers (%zu bytes)",
               dumps[0].size());
}

}  // namespace

int main() {
    Runner r;
    r.run("stable chain identity (density + Laplace exponent)", criterion_1);
    r.run("jump kernel closed form for the Gaussian stable chain", criterion_2);
    r.run("criterion trichotomy on 500 random pairs", criterion_3);
    r.run("necessity direction: refusals exit 2", criterion_4);
    r.run("effective scale closed forms and corollary battery", criterion_5);
    r.run("sub-Gaussian jump kernel comparability", criterion_6);
    r.run("Monte Carlo exit times (Z1, Z2, SG8, subordinated, mixed)", criterion_7);
    r.run("subordinator sampler Laplace checks and eps-refinement", criterion_8);
    r.run("report determinism across worker counts", criterion_9);

    if (r.failures == 0)
        std::printf("acceptance: all %d criteria passed\n", r.index);
    else
        std::printf("acceptance: %d of %d criteria FAILED\n", r.failures, r.index);
    return r.failures == 0 ? 0 : 1;
}
