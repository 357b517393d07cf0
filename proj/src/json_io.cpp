#include "subdiff/json_io.hpp"

#include <cstdio>
#include <fstream>

namespace subdiff {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

double require_positive(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) fail(path, "must be positive and finite");
    return v;
}

std::vector<double> parse_grid(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() < 2) fail(path, "expected an array of >= 2 numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const double v = require_positive(j[i], p);
        if (!out.empty() && !(v > out.back())) fail(p, "grid must be strictly increasing");
        out.push_back(v);
    }
    return out;
}

}  // namespace

nlohmann::json scale_function_to_json(const ScaleFunction& psi) {
    json segs = json::array();
    for (const auto& s : psi.segments()) {
        json seg;
        seg["r_max"] = (s.r_max == kInf) ? json("inf") : json(s.r_max);
        seg["beta"] = s.beta;
        segs.push_back(seg);
    }
    return json{{"c0", psi.c0()}, {"segments", segs}};
}

ScaleFunction scale_function_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    if (!j.contains("c0")) fail(path + ".c0", "missing");
    if (!j.contains("segments")) fail(path + ".segments", "missing");
    const double c0 = require_positive(j["c0"], path + ".c0");
    const json& segs = j["segments"];
    if (!segs.is_array() || segs.empty())
        fail(path + ".segments", "expected a non-empty array");
    std::vector<Segment> out;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string p = path + ".segments[" + std::to_string(i) + "]";
        const json& seg = segs[i];
        if (!seg.is_object()) fail(p, "expected an object");
        if (!seg.contains("r_max")) fail(p + ".r_max", "missing");
        if (!seg.contains("beta")) fail(p + ".beta", "missing");
        double r_max;
        if (seg["r_max"].is_string()) {
            if (seg["r_max"].get<std::string>() != "inf")
                fail(p + ".r_max", "expected a number or \"inf\"");
            r_max = kInf;
        } else {
            r_max = require_positive(seg["r_max"], p + ".r_max");
        }
        const double beta = require_positive(seg["beta"], p + ".beta");
        out.push_back(Segment{r_max, beta});
    }
    try {
        return ScaleFunction(c0, std::move(out));
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

nlohmann::json model_to_json(const HeatKernelModel& model) {
    if (model.is_gaussian()) return json{{"kind", "gaussian"}, {"n", model.dimension()}};
    return json{{"kind", "subgaussian"},
                {"psi_c", scale_function_to_json(model.psi_c())},
                {"alpha_v", model.volume().alpha_v},
                {"c_V", model.volume().c_V},
                {"C1", model.C1()},
                {"c1", model.c1()},
                {"c2", model.c2()},
                {"c3", model.c3()},
                {"delta", model.delta()}};
}

HeatKernelModel model_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    if (!j.contains("kind")) fail(path + ".kind", "missing");
    const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (kind == "gaussian") {
        if (!j.contains("n") || !j["n"].is_number_integer())
            fail(path + ".n", "expected an integer dimension");
        const int n = j["n"].get<int>();
        if (n < 1 || n > 3) fail(path + ".n", "dimension must be 1..3");
        return HeatKernelModel::exact_gaussian(n);
    }
    if (kind == "subgaussian") {
        for (const char* key : {"psi_c", "alpha_v", "c_V", "C1", "c1", "c2", "c3", "delta"})
            if (!j.contains(key)) fail(path + "." + key, "missing");
        const ScaleFunction psi_c = scale_function_from_json(j["psi_c"], path + ".psi_c");
        const VolumeModel vol{require_positive(j["alpha_v"], path + ".alpha_v"),
                              require_positive(j["c_V"], path + ".c_V")};
        try {
            return HeatKernelModel::sub_gaussian(
                psi_c, vol, require_positive(j["C1"], path + ".C1"),
                require_positive(j["c1"], path + ".c1"),
                require_positive(j["c2"], path + ".c2"),
                require_positive(j["c3"], path + ".c3"),
                require_positive(j["delta"], path + ".delta"));
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
    }
    fail(path + ".kind", "expected \"gaussian\" or \"subgaussian\"");
}

namespace {

SimulateSpec parse_simulate(const json& j, const std::string& path) {
    SimulateSpec spec;
    if (!j.is_object()) fail(path, "expected an object");
    if (!j.contains("graph")) fail(path + ".graph", "missing");
    const json& g = j["graph"];
    if (!g.is_object() || !g.contains("kind")) fail(path + ".graph.kind", "missing");
    const std::string kind = g["kind"].is_string() ? g["kind"].get<std::string>() : "";
    if (kind == "lattice") {
        spec.graph_kind = WalkGraph::Kind::Lattice;
        if (!g.contains("n") || !g["n"].is_number_integer())
            fail(path + ".graph.n", "expected an integer");
        spec.dim_or_level = g["n"].get<int>();
        if (spec.dim_or_level < 1 || spec.dim_or_level > 3)
            fail(path + ".graph.n", "lattice dimension must be 1..3");
    } else if (kind == "gasket") {
        spec.graph_kind = WalkGraph::Kind::Gasket;
        if (!g.contains("level") || !g["level"].is_number_integer())
            fail(path + ".graph.level", "expected an integer");
        spec.dim_or_level = g["level"].get<int>();
        if (spec.dim_or_level < 0 || spec.dim_or_level > 9)
            fail(path + ".graph.level", "gasket level must be 0..9");
    } else {
        fail(path + ".graph.kind", "expected \"lattice\" or \"gasket\"");
    }

    if (!j.contains("mode")) fail(path + ".mode", "missing");
    const std::string mode = j["mode"].is_string() ? j["mode"].get<std::string>() : "";
    if (mode == "diffusion")
        spec.mode = SimulateSpec::Mode::Diffusion;
    else if (mode == "subordinated")
        spec.mode = SimulateSpec::Mode::Subordinated;
    else if (mode == "jumptail")
        spec.mode = SimulateSpec::Mode::JumpTail;
    else
        fail(path + ".mode", "expected \"diffusion\", \"subordinated\" or \"jumptail\"");

    if (spec.mode != SimulateSpec::Mode::JumpTail) {
        if (!j.contains("radii")) fail(path + ".radii", "missing");
        spec.radii = parse_grid(j["radii"], path + ".radii");
    }
    if (j.contains("paths")) {
        if (!j["paths"].is_number_integer() || j["paths"].get<std::int64_t>() < 2)
            fail(path + ".paths", "expected an integer >= 2");
        spec.paths = (int)j["paths"].get<std::int64_t>();
    }
    if (j.contains("samples")) {
        if (!j["samples"].is_number_integer() || j["samples"].get<std::int64_t>() < 100)
            fail(path + ".samples", "expected an integer >= 100");
        spec.samples = j["samples"].get<std::int64_t>();
    }
    if (j.contains("identity_clock")) {
        if (!j["identity_clock"].is_boolean()) fail(path + ".identity_clock", "expected a bool");
        spec.identity_clock = j["identity_clock"].get<bool>();
    }
    if (j.contains("center") && !(j["center"].is_string() &&
                                  j["center"].get<std::string>() == "auto")) {
        if (!j["center"].is_number_integer() || j["center"].get<std::int64_t>() < 0)
            fail(path + ".center", "expected \"auto\" or a vertex index");
        spec.center = (std::size_t)j["center"].get<std::int64_t>();
    }
    return spec;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    ExperimentConfig cfg;
    cfg.raw = j;

    if (j.contains("psi_c")) cfg.psi_c = scale_function_from_json(j["psi_c"], "psi_c");
    if (j.contains("psi_j")) cfg.psi_j = scale_function_from_json(j["psi_j"], "psi_j");
    if (j.contains("model")) cfg.model = model_from_json(j["model"], "model");

    if (j.contains("d_grid")) cfg.d_grid = parse_grid(j["d_grid"], "d_grid");
    if (j.contains("r_grid")) cfg.r_grid = parse_grid(j["r_grid"], "r_grid");
    if (j.contains("lambda_grid")) cfg.lambda_grid = parse_grid(j["lambda_grid"], "lambda_grid");
    if (j.contains("t_grid"))
        cfg.t_grid = parse_grid(j["t_grid"], "t_grid");
    else
        cfg.t_grid = cfg.lambda_grid;

    if (j.contains("sampler")) {
        const json& s = j["sampler"];
        if (!s.is_object()) throw ConfigError("sampler: expected an object");
        cfg.has_sampler = true;
        if (s.contains("epsilon")) cfg.sampler.epsilon = require_positive(s["epsilon"], "sampler.epsilon");
        if (s.contains("horizon")) cfg.sampler.horizon = require_positive(s["horizon"], "sampler.horizon");
        if (!s.contains("seed") || !s["seed"].is_number_integer())
            throw ConfigError("sampler.seed: required integer (stochastic commands need a seed)");
        cfg.sampler.seed = s["seed"].get<std::uint64_t>();
        if (s.contains("paths")) {
            if (!s["paths"].is_number_integer() || s["paths"].get<std::int64_t>() < 0)
                throw ConfigError("sampler.paths: expected a nonnegative integer");
            cfg.sampler_paths = s["paths"].get<std::int64_t>();
        }
    }

    if (j.contains("simulate")) cfg.simulate = parse_simulate(j["simulate"], "simulate");

    if (j.contains("max_C")) {
        cfg.max_C = require_positive(j["max_C"], "max_C");
        if (cfg.max_C < 1.0) throw ConfigError("max_C: must be >= 1");
    }
    if (j.contains("workers")) {
        if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 1)
            throw ConfigError("workers: expected a positive integer");
        cfg.workers = j["workers"].get<int>();
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ConfigError("out: expected a string");
        cfg.out = j["out"].get<std::string>();
    }

    // Model/scale consistency: the kernel chain and the subordination chain
    // must share psi_c.
    if (cfg.model && cfg.psi_c && !(cfg.model->psi_c() == *cfg.psi_c))
        throw ConfigError("model.psi_c: must match the top-level psi_c");

    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_double(columns[c][r]);
        out << "\n";
    }
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace subdiff
