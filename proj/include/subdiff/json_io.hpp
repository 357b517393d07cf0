#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subdiff/heat_kernel.hpp"
#include "subdiff/scale_function.hpp"
#include "subdiff/subordination.hpp"
#include "subdiff/walk_graph.hpp"

namespace subdiff {

nlohmann::json scale_function_to_json(const ScaleFunction& psi);
ScaleFunction scale_function_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json model_to_json(const HeatKernelModel& model);
HeatKernelModel model_from_json(const nlohmann::json& j, const std::string& path);

/// One experiment: scales, optional kernel model, grids, sampler and
/// simulation settings. Parsed eagerly with field-path error messages.
struct SimulateSpec {
    enum class Mode { Diffusion, Subordinated, JumpTail };
    WalkGraph::Kind graph_kind = WalkGraph::Kind::Lattice;
    int dim_or_level = 1;
    Mode mode = Mode::Diffusion;
    std::vector<double> radii;
    int paths = 10000;
    std::int64_t samples = 100000;
    bool identity_clock = false;
    std::optional<std::size_t> center;  // nullopt: graph default
};

struct ExperimentConfig {
    std::optional<ScaleFunction> psi_c, psi_j;
    std::optional<HeatKernelModel> model;
    std::vector<double> d_grid, r_grid, lambda_grid, t_grid;
    SamplerConfig sampler;
    bool has_sampler = false;
    std::int64_t sampler_paths = 0;
    std::optional<SimulateSpec> simulate;
    double max_C = 1e3;
    int workers = 1;
    std::string out = "out";
    nlohmann::json raw;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// %.17g: exact double round-trip, locale-independent.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

std::uint64_t fnv1a(const std::string& data);

}  // namespace subdiff
