#include "subdiff/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "subdiff/effective_scale.hpp"
#include "subdiff/json_io.hpp"
#include "subdiff/mc_lab.hpp"
#include "subdiff/quadrature.hpp"

namespace subdiff::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json criterion_to_json(const CriterionValue& v) {
    if (v.is_divergent()) return json("divergent");
    return json(v.value());
}

struct Context {
    ExperimentConfig cfg;
    fs::path out;
    std::uint64_t config_hash = 0;
};

void write_json(const Context& ctx, const std::string& name, const json& j) {
    std::ofstream f(ctx.out / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (ctx.out / name).string());
    f << j.dump(2) << "\n";
}

const ScaleFunction& need_psi_c(const Context& ctx) {
    if (!ctx.cfg.psi_c) throw ConfigError("psi_c: required by this command");
    return *ctx.cfg.psi_c;
}

const ScaleFunction& need_psi_j(const Context& ctx) {
    if (!ctx.cfg.psi_j) throw ConfigError("psi_j: required by this command");
    return *ctx.cfg.psi_j;
}

json run_criterion(const Context& ctx) {
    const auto& pc = need_psi_c(ctx);
    const auto& pj = need_psi_j(ctx);
    const CriterionValue crit = criterion_integral(pc, pj);
    const CriterionValue equiv = criterion_equivalent(pc, pj);
    const CriterionValue suff = sufficient_condition(pj);
    json out{{"crit", criterion_to_json(crit)},
             {"equiv", criterion_to_json(equiv)},
             {"suff", criterion_to_json(suff)},
             {"decision", crit.is_finite() ? "finite" : "divergent"}};
    write_json(ctx, "criterion.json", out);
    return out;
}

json run_phi(const Context& ctx) {
    const auto& pc = need_psi_c(ctx);
    if (ctx.cfg.d_grid.empty()) throw ConfigError("d_grid: required by the phi command");
    if (ctx.cfg.t_grid.empty())
        throw ConfigError("t_grid: required by the phi command (or provide lambda_grid)");
    std::vector<double> col_R, col_t, col_phi;
    for (double R : ctx.cfg.d_grid)
        for (double t : ctx.cfg.t_grid) {
            col_R.push_back(R);
            col_t.push_back(t);
            col_phi.push_back(phi_sup(pc, R, t));
        }
    write_csv((ctx.out / "phi.csv").string(), {"R", "t", "phi"}, {col_R, col_t, col_phi});
    return json{{"rows", col_R.size()}};
}

json run_subordinator(const Context& ctx) {
    const auto& pc = need_psi_c(ctx);
    const auto& pj = need_psi_j(ctx);
    if (ctx.cfg.lambda_grid.empty())
        throw ConfigError("lambda_grid: required by the subordinator command");
    if (!ctx.cfg.has_sampler)
        throw ConfigError("sampler: required by the subordinator command");

    const LevyMeasure nu = build_levy_measure(pc, pj);
    nu.require_usable("subordinator");

    const double eps = ctx.cfg.sampler.epsilon;
    std::vector<double> col_l, col_phi, col_phi_eps;
    for (double lam : ctx.cfg.lambda_grid) {
        col_l.push_back(lam);
        col_phi.push_back(laplace_exponent(nu, lam));
        col_phi_eps.push_back(laplace_exponent_truncated(nu, eps, lam));
    }
    write_csv((ctx.out / "laplace.csv").string(), {"lambda", "phi", "phi_trunc"},
              {col_l, col_phi, col_phi_eps});

    const TruncationStats stats = truncation_stats(nu, eps);
    json out{{"epsilon", eps},
             {"tail_mass", stats.tail_mass},
             {"small_drift", stats.small_drift},
             {"one_wedge_mass", nu.one_wedge_mass()}};

    if (ctx.cfg.sampler_paths > 0) {
        const std::int64_t n = ctx.cfg.sampler_paths;
        const double horizon = ctx.cfg.sampler.horizon;
        const SubordinatorSampler sampler(nu, eps);
        const double lambdas[] = {0.5, 1.0, 2.0};

        std::vector<double> values((std::size_t)n);
        mc::parallel_for((std::size_t)n, ctx.cfg.workers, [&](std::size_t i) {
            std::mt19937_64 rng = mc::path_rng(ctx.cfg.sampler.seed, 0x5AB0, i);
            values[i] = sampler.increment(horizon, rng);
        });
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= (double)n;

        json checks = json::array();
        for (double lam : lambdas) {
            double s = 0.0, s2 = 0.0;
            for (double v : values) {
                const double e = std::exp(-lam * v);
                s += e;
                s2 += e * e;
            }
            const double emp = s / (double)n;
            const double var = std::max(0.0, (s2 - (double)n * emp * emp) / (double)(n - 1));
            const double se = std::sqrt(var / (double)n);
            const double expected = std::exp(-horizon * laplace_exponent_truncated(nu, eps, lam));
            checks.push_back(json{{"lambda", lam},
                                  {"empirical", emp},
                                  {"expected", expected},
                                  {"stderr", se},
                                  {"within_3se", std::abs(emp - expected) <= 3.0 * se}});
        }
        out["samples"] = json{{"paths", n}, {"horizon", horizon}, {"mean_increment", mean},
                              {"laplace_checks", checks}};
    }
    write_json(ctx, "subordinator.json", out);
    return out;
}

json run_jumpkernel(const Context& ctx) {
    const auto& pc = need_psi_c(ctx);
    const auto& pj = need_psi_j(ctx);
    if (!ctx.cfg.model) throw ConfigError("model: required by the jumpkernel command");
    if (ctx.cfg.d_grid.empty()) throw ConfigError("d_grid: required by the jumpkernel command");

    const LevyMeasure nu = build_levy_measure(pc, pj);
    nu.require_usable("jumpkernel");
    const VolumeModel& vol = ctx.cfg.model->volume();

    const ComparabilityReport rep = verify_jump_comparability(
        *ctx.cfg.model, nu, pj, vol, ctx.cfg.d_grid, ctx.cfg.max_C);

    std::vector<double> col_V, col_pj;
    for (double d : rep.d_grid) {
        col_V.push_back(vol(d));
        col_pj.push_back(pj(d));
    }
    write_csv((ctx.out / "jumpkernel.csv").string(), {"d", "J", "V", "psi_j", "ratio"},
              {rep.d_grid, rep.lhs, col_V, col_pj, rep.ratio});

    json out{{"criterion", criterion_to_json(nu.criterion())},
             {"C_emp", rep.C_emp},
             {"ratio_min", rep.ratio_min},
             {"ratio_max", rep.ratio_max},
             {"log_slope", rep.log_slope},
             {"drift_low", rep.drift_low},
             {"drift_high", rep.drift_high},
             {"C_max", rep.C_max},
             {"pass", rep.pass}};
    write_json(ctx, "comparability.json", out);
    return out;
}

json run_effscale(const Context& ctx) {
    const auto& pc = need_psi_c(ctx);
    const auto& pj = need_psi_j(ctx);
    if (ctx.cfg.r_grid.empty()) throw ConfigError("r_grid: required by the effscale command");

    const EffectiveScale hat(pc, pj);  // refuses on a divergent criterion
    std::vector<double> col_r, col_c, col_j, col_I, col_hat;
    for (double r : ctx.cfg.r_grid) {
        col_r.push_back(r);
        col_c.push_back(pc(r));
        col_j.push_back(pj(r));
        col_I.push_back(hat.integral(r));
        col_hat.push_back(hat(r));
    }
    write_csv((ctx.out / "effscale.csv").string(), {"r", "psi_c", "psi_j", "I", "psi_hat"},
              {col_r, col_c, col_j, col_I, col_hat});

    const ScaleBounds bounds = certify_effective_bounds(pc, pj);
    const CorollaryConstants cons = verify_corollary_inequalities(pc, pj, ctx.cfg.r_grid);
    json out{{"bounds", json{{"C", bounds.C}, {"beta_lo", bounds.beta_lo}, {"beta_hi", bounds.beta_hi}}},
             {"constants", json{{"cor1", cons.cor1},
                                {"cor2", cons.cor2},
                                {"cor3", cons.cor3},
                                {"cor4a", cons.cor4a},
                                {"cor4b", cons.cor4b}}},
             {"max_refinement_drift", cons.max_refinement_drift},
             {"pass", cons.pass}};
    write_json(ctx, "effscale.json", out);
    return out;
}

json run_simulate(const Context& ctx) {
    if (!ctx.cfg.simulate) throw ConfigError("simulate: required by the simulate command");
    const SimulateSpec& spec = *ctx.cfg.simulate;
    if (!ctx.cfg.has_sampler)
        throw ConfigError("sampler: required by the simulate command (stochastic "
                          "commands need an explicit seed)");

    const WalkGraph graph = (spec.graph_kind == WalkGraph::Kind::Lattice)
                                ? WalkGraph::lattice(spec.dim_or_level)
                                : WalkGraph::gasket(spec.dim_or_level);
    const std::size_t center =
        spec.center.value_or(graph.kind() == WalkGraph::Kind::Gasket
                                 ? graph.default_center()
                                 : 0);
    const std::uint64_t seed = ctx.cfg.sampler.seed;

    json out{{"seed", seed}, {"config_hash", ctx.config_hash}};

    std::optional<LevyMeasure> nu;
    if (spec.mode != SimulateSpec::Mode::Diffusion &&
        !(spec.mode == SimulateSpec::Mode::JumpTail && spec.identity_clock)) {
        nu.emplace(need_psi_c(ctx), need_psi_j(ctx));
        nu->require_usable("simulate");
    }

    if (spec.mode == SimulateSpec::Mode::JumpTail) {
        const mc::JumpTailTable table = mc::jump_tail_stats(
            graph, nu ? &*nu : nullptr, ctx.cfg.sampler, spec.samples, seed,
            ctx.cfg.workers);
        std::vector<double> col_count(table.count.begin(), table.count.end());
        write_csv((ctx.out / "jumptail.csv").string(), {"d", "tail", "count"},
                  {table.d, table.tail, col_count});
        out["mode"] = "jumptail";
        out["samples"] = table.samples;
        if (table.slope.valid) {
            out["slope"] = table.slope.exponent;
            out["ci"] = json::array({table.slope.ci_lo, table.slope.ci_hi});
        } else {
            out["slope"] = nullptr;
        }
        write_json(ctx, "simulate.json", out);
        return out;
    }

    const mc::ExitTimeEstimate est =
        (spec.mode == SimulateSpec::Mode::Diffusion)
            ? mc::exit_time_diffusion(graph, center, spec.radii, spec.paths, seed,
                                      ctx.cfg.workers)
            : mc::exit_time_subordinated(graph, *nu, ctx.cfg.sampler, center, spec.radii,
                                         spec.paths, seed, ctx.cfg.workers);

    std::vector<double> col_paths(est.paths.begin(), est.paths.end());
    std::vector<double> col_cens(est.censored.begin(), est.censored.end());
    write_csv((ctx.out / "exit_times.csv").string(),
              {"r", "mean", "stderr", "n_paths", "censored"},
              {est.radii, est.mean_exit, est.std_error, col_paths, col_cens});
    out["mode"] = (spec.mode == SimulateSpec::Mode::Diffusion) ? "diffusion" : "subordinated";
    out["exponent"] = est.fitted_exponent;
    out["ci"] = json::array({est.ci_lo, est.ci_hi});
    out["insufficient"] = est.insufficient;
    write_json(ctx, "simulate.json", out);
    return out;
}

json run_report(const Context& ctx, int& exit_code) {
    json report;
    report["seed"] = ctx.cfg.sampler.seed;
    report["config_hash"] = ctx.config_hash;
    report["criterion"] = run_criterion(ctx);

    auto guarded = [&](const char* name, auto&& fn) {
        try {
            report[name] = fn();
        } catch (const RefusalError& e) {
            report[name] = json{{"refused", e.what()}};
            exit_code = 2;
        }
    };

    if (ctx.cfg.psi_c && !ctx.cfg.d_grid.empty() && !ctx.cfg.t_grid.empty())
        report["phi"] = run_phi(ctx);
    if (ctx.cfg.psi_c && ctx.cfg.psi_j && ctx.cfg.has_sampler &&
        !ctx.cfg.lambda_grid.empty())
        guarded("subordinator", [&] { return run_subordinator(ctx); });
    if (ctx.cfg.model && !ctx.cfg.d_grid.empty())
        guarded("comparability", [&] { return run_jumpkernel(ctx); });
    if (ctx.cfg.psi_c && ctx.cfg.psi_j && !ctx.cfg.r_grid.empty())
        guarded("effscale", [&] { return run_effscale(ctx); });
    if (ctx.cfg.simulate)
        guarded("simulate", [&] { return run_simulate(ctx); });

    write_json(ctx, "report.json", report);
    return report;
}

int dispatch(const std::string& command, Context& ctx) {
    int code = 0;
    if (command == "criterion")
        run_criterion(ctx);
    else if (command == "phi")
        run_phi(ctx);
    else if (command == "subordinator")
        run_subordinator(ctx);
    else if (command == "jumpkernel")
        run_jumpkernel(ctx);
    else if (command == "effscale")
        run_effscale(ctx);
    else if (command == "simulate")
        run_simulate(ctx);
    else if (command == "report")
        run_report(ctx, code);
    else
        throw ConfigError("command: unknown command \"" + command + "\"");
    return code;
}

}  // namespace

int run_command(const std::string& command, const nlohmann::json& config,
                const Options& options) {
    try {
        Context ctx;
        ctx.cfg = parse_config(config);
        if (options.seed) ctx.cfg.sampler.seed = *options.seed;
        if (options.max_C) {
            if (!(*options.max_C >= 1.0)) throw ConfigError("--max-C: must be >= 1");
            ctx.cfg.max_C = *options.max_C;
        }
        if (options.workers) {
            if (*options.workers < 1) throw ConfigError("--workers: must be >= 1");
            ctx.cfg.workers = *options.workers;
        }
        ctx.out = options.out_dir.empty() ? fs::path(ctx.cfg.out) : fs::path(options.out_dir);
        fs::create_directories(ctx.out);

        // Hash the experiment identity: exclude execution details so the same
        // experiment hashes identically regardless of worker count or out dir.
        json canonical = ctx.cfg.raw;
        canonical.erase("workers");
        canonical.erase("out");
        if (canonical.contains("sampler") && canonical["sampler"].is_object())
            canonical["sampler"]["seed"] = ctx.cfg.sampler.seed;
        if (options.max_C) canonical["max_C"] = *options.max_C;
        ctx.config_hash = fnv1a(canonical.dump());

        return dispatch(command, ctx);
    } catch (const RefusalError& e) {
        std::cerr << "refusal: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_command(const std::string& command, const Options& options) {
    try {
        std::ifstream in(options.config_path);
        if (!in) {
            std::cerr << "config error: cannot open " << options.config_path << "\n";
            return 1;
        }
        nlohmann::json j;
        in >> j;
        return run_command(command, j, options);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace subdiff::cli
