#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace safeplan::cli {

enum class ExitCode : int {
    Ok = 0,
    Usage = 1,
    Io = 2,
    Config = 3,
    MapFormat = 4,
    FitNotConverged = 5,
    FitSingleLabel = 6,
    StartInCollision = 7,
    NoPath = 8,
    SimTimeout = 9,
    SimInfeasible = 10,
    SimUnsafe = 11,
    MalformedInput = 12,
};

/// Code and one-line meaning for every exit status, in numeric order.
const std::vector<std::pair<ExitCode, const char*>>& exit_code_table();

/// Flags shared by all subcommands; unused ones are ignored.
struct CommandOptions {
    std::string map;
    std::string config;
    std::string barriers;
    std::string out;  ///< output directory, created if missing
    std::string path;
    std::string tree;
    std::string trajectory;
    std::optional<std::uint64_t> seed;  ///< overrides planner.seed
};

// Outputs, all under --out:
//   fit       barriers.txt
//   plan      path.csv, tree.csv
//   simulate  trajectory.csv
//   render    render.svg
// plus <command>_manifest.json and <command>_config.txt for each run.
ExitCode cmd_fit(const CommandOptions& opts);
ExitCode cmd_plan(const CommandOptions& opts);
ExitCode cmd_simulate(const CommandOptions& opts);
ExitCode cmd_render(const CommandOptions& opts);

}  // namespace safeplan::cli
