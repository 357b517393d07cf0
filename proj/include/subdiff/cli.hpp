#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace subdiff::cli {

struct Options {
    std::string config_path;
    std::string out_dir;  // empty: take config "out"
    std::optional<std::uint64_t> seed;
    std::optional<double> max_C;
    std::optional<int> workers;
};

/// Runs one subcommand (criterion, phi, subordinator, jumpkernel, effscale,
/// simulate, report) against a config file, writing artifacts into the output
/// directory. Exit code 0 on success, 2 on mathematical refusal (construction
/// requested on a divergent criterion), 1 on error.
int run_command(const std::string& command, const Options& options);

/// Same, with an already-parsed config.
int run_command(const std::string& command, const nlohmann::json& config,
                const Options& options);

}  // namespace subdiff::cli
