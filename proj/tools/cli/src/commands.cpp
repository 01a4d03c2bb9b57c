#include "safeplan/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "safeplan/barrier.hpp"
#include "safeplan/cli/manifest.hpp"
#include "safeplan/config.hpp"
#include "safeplan/csv_io.hpp"
#include "safeplan/gridmap.hpp"
#include "safeplan/planner.hpp"
#include "safeplan/render.hpp"
#include "safeplan/sim.hpp"

namespace fs = std::filesystem;

namespace safeplan::cli {

const std::vector<std::pair<ExitCode, const char*>>& exit_code_table()
{
    static const std::vector<std::pair<ExitCode, const char*>> table = {
        {ExitCode::Ok, "success"},
        {ExitCode::Usage, "usage error (missing flag, empty path file)"},
        {ExitCode::Io, "input or output file error"},
        {ExitCode::Config, "invalid config file"},
        {ExitCode::MapFormat, "malformed map file"},
        {ExitCode::FitNotConverged, "a region fit did not converge"},
        {ExitCode::FitSingleLabel, "a region window holds one label only"},
        {ExitCode::StartInCollision, "start pose is in collision"},
        {ExitCode::NoPath, "no path within the iteration budget"},
        {ExitCode::SimTimeout, "rollout timed out before the goal"},
        {ExitCode::SimInfeasible, "safety QP infeasible during rollout"},
        {ExitCode::SimUnsafe, "rollout reached min_h below -1e-3 or left the map"},
        {ExitCode::MalformedInput, "malformed barrier or CSV file"},
    };
    return table;
}

namespace {

constexpr double kSimSafetyTolerance = 1e-3;

struct Failure {
    ExitCode code;
    std::string message;
};

class Run {
public:
    Run(std::string command, const CommandOptions& opts) : opts_(opts)
    {
        manifest_.command = std::move(command);
    }

    void start()
    {
        const CommandOptions& opts = opts_;
        if (opts.out.empty())
            throw Failure{ExitCode::Usage, "--out is required"};
        std::error_code ec;
        fs::create_directories(opts.out, ec);
        if (ec || !fs::is_directory(opts.out))
            throw Failure{ExitCode::Io, "cannot create output directory " + opts.out};
        out_ready_ = true;
        try {
            if (!opts.config.empty())
                require_file(opts.config, "config");
            config_ = load_config(opts.config);
        } catch (const ConfigError& e) {
            throw Failure{ExitCode::Config, e.what()};
        }
        if (opts.seed)
            config_.planner.rng_seed = *opts.seed;
        manifest_.rng_seed = config_.planner.rng_seed;
        manifest_.config = to_text(config_);
        if (!opts.config.empty())
            manifest_.add_input("config", opts.config);
        mark_ = Clock::now();
    }

    const AppConfig& config() const { return config_; }

    static void require_file(const std::string& path, const char* what)
    {
        if (path.empty())
            throw Failure{ExitCode::Usage, std::string("--") + what + " is required"};
        if (!fs::is_regular_file(path))
            throw Failure{ExitCode::Io, std::string("cannot read ") + what + " file " + path};
    }

    /// Records the digest before the file is read.
    void input(const std::string& role, const std::string& path)
    {
        require_file(path, role.c_str());
        try {
            manifest_.add_input(role, path);
        } catch (const std::runtime_error& e) {
            throw Failure{ExitCode::Io, e.what()};
        }
    }

    void stage(const std::string& name)
    {
        const auto now = Clock::now();
        manifest_.timings.push_back(
            {name, std::chrono::duration<double, std::milli>(now - mark_).count()});
        mark_ = now;
    }

    std::string out_path(const std::string& file) const { return (fs::path(opts_.out) / file).string(); }

    void write(const std::string& role, const std::string& file, const std::string& content)
    {
        const std::string p = out_path(file);
        std::ofstream f(p, std::ios::binary);
        f << content;
        if (!f)
            throw Failure{ExitCode::Io, "cannot write " + p};
        manifest_.outputs.push_back({role, p});
    }

    /// Writes the manifest and config snapshot; safe to call on failure paths.
    void finish()
    {
        if (!out_ready_)
            return;
        const std::string cfg = out_path(manifest_.command + "_config.txt");
        const std::string man = out_path(manifest_.command + "_manifest.json");
        manifest_.outputs.push_back({"config_snapshot", cfg});
        std::ofstream(cfg, std::ios::binary) << manifest_.config;
        std::ofstream(man, std::ios::binary) << manifest_.to_json();
    }

private:
    using Clock = std::chrono::steady_clock;
    const CommandOptions& opts_;
    AppConfig config_;
    RunManifest manifest_;
    Clock::time_point mark_;
    bool out_ready_ = false;
};

OccupancyGrid read_map(const std::string& path)
{
    try {
        return load_map(path);
    } catch (const MapError& e) {
        throw Failure{ExitCode::MapFormat, e.what()};
    }
}

std::vector<BarrierFunction> read_barriers(const std::string& path)
{
    std::ifstream in(path);
    try {
        return read_barrier_set(in);
    } catch (const std::runtime_error& e) {
        throw Failure{ExitCode::MalformedInput, path + ": " + e.what()};
    }
}

template <typename Reader>
auto read_csv(const std::string& path, Reader reader)
{
    std::ifstream in(path);
    try {
        return reader(in);
    } catch (const CsvError& e) {
        throw Failure{ExitCode::MalformedInput, path + ": " + e.what()};
    }
}

template <typename Body>
ExitCode guarded(const char* name, const CommandOptions& opts, Body body)
{
    Run run(name, opts);
    ExitCode code = ExitCode::Ok;
    try {
        run.start();
        code = body(run);
    } catch (const Failure& f) {
        spdlog::error("{}: {}", name, f.message);
        code = f.code;
    }
    run.finish();
    return code;
}

}  // namespace

ExitCode cmd_fit(const CommandOptions& opts)
{
    return guarded("fit", opts, [&](Run& run) {
        const AppConfig& cfg = run.config();
        run.input("map", opts.map);
        const OccupancyGrid map = read_map(opts.map);
        run.stage("load");

        const OccupancyGrid inflated = inflate(map, cfg.ds);
        const auto regions = partition_regions(inflated);
        run.stage("inflate");
        if (regions.empty())
            spdlog::warn("fit: map has no occupied cells, writing an empty barrier set");

        std::vector<BarrierFunction> barriers;
        ExitCode code = ExitCode::Ok;
        for (const auto& region : regions) {
            FitResult r;
            try {
                r = fit_region(inflated, region, cfg.fit);
            } catch (const FitError& e) {
                throw Failure{ExitCode::FitSingleLabel,
                              fmt::format("region {}: {}", region.id, e.what())};
            }
            spdlog::info("region {}: cells={} samples={} iterations={} cost={:.6g} "
                         "accuracy={:.4f} converged={}",
                         region.id, region.cells.size(), r.report.samples_used,
                         r.report.iterations, r.report.final_cost, r.report.train_accuracy,
                         r.report.converged);
            if (!r.report.converged) {
                spdlog::error("fit: region {} did not converge", region.id);
                code = ExitCode::FitNotConverged;
            }
            barriers.push_back(r.barrier);
        }
        run.stage("fit");

        std::ostringstream os;
        write_barrier_set(os, barriers);
        run.write("barriers", "barriers.txt", os.str());
        run.stage("write");
        return code;
    });
}

ExitCode cmd_plan(const CommandOptions& opts)
{
    return guarded("plan", opts, [&](Run& run) {
        const AppConfig& cfg = run.config();
        run.input("map", opts.map);
        run.input("barriers", opts.barriers);
        const OccupancyGrid map = read_map(opts.map);
        const auto barriers = read_barriers(opts.barriers);
        const OccupancyGrid inflated = inflate(map, cfg.ds);
        run.stage("load");

        if (!inflated.free_at(cfg.goal))
            spdlog::warn("plan: goal ({}, {}) is not in free space", cfg.goal.x, cfg.goal.y);

        const PlanResult result = [&] {
            try {
                return plan(inflated, barriers, cfg.planner, cfg.start, cfg.goal);
            } catch (const PlanningError& e) {
                throw Failure{ExitCode::StartInCollision, e.what()};
            }
        }();
        run.stage("plan");
        spdlog::info("plan: nodes={} anchors={} found={} first_iteration={} cost={:.6g}",
                     result.tree.size(), result.tree.tree_ids().size(), result.found,
                     result.first_found_iteration,
                     result.found ? result.path.back().cost : std::nan(""));

        std::ostringstream path_csv, tree_csv;
        write_path_csv(path_csv, result.path);
        write_tree_csv(tree_csv, result.tree);
        run.write("path", "path.csv", path_csv.str());
        run.write("tree", "tree.csv", tree_csv.str());
        run.stage("write");
        if (!result.found) {
            spdlog::error("plan: no path within {} iterations", cfg.planner.max_iterations);
            return ExitCode::NoPath;
        }
        return ExitCode::Ok;
    });
}

ExitCode cmd_simulate(const CommandOptions& opts)
{
    return guarded("simulate", opts, [&](Run& run) {
        const AppConfig& cfg = run.config();
        run.input("path", opts.path);
        run.input("map", opts.map);
        run.input("barriers", opts.barriers);
        const auto waypoints = read_csv(opts.path, read_path_csv);
        if (waypoints.empty())
            throw Failure{ExitCode::Usage, "path file " + opts.path + " has no waypoints"};
        const OccupancyGrid map = read_map(opts.map);
        const auto barriers = read_barriers(opts.barriers);
        const OccupancyGrid inflated = inflate(map, cfg.ds);
        run.stage("load");

        std::vector<RobotState> path;
        for (const auto& w : waypoints)
            path.push_back(w.state);
        const SafetyFilter filter{barriers, cfg.planner.gains, cfg.planner.bounds,
                                  cfg.planner.active_margin};
        const FollowResult result = follow_path(path, filter, inflated, cfg.planner.v, cfg.sim);
        run.stage("simulate");

        std::ostringstream os;
        write_trajectory_csv(os, result.trajectory);
        run.write("trajectory", "trajectory.csv", os.str());
        run.stage("write");

        const auto& samples = result.trajectory.samples;
        spdlog::info("simulate: steps={} t_end={:.2f} min_h={:.6g} occupied_steps={}",
                     samples.size(), samples.empty() ? 0.0 : samples.back().t, result.min_h,
                     result.occupied_steps);
        switch (result.status) {
        case FollowStatus::Timeout:
            spdlog::error("simulate: timed out before reaching the final waypoint");
            return ExitCode::SimTimeout;
        case FollowStatus::QpInfeasible:
            spdlog::error("simulate: safety QP infeasible");
            return ExitCode::SimInfeasible;
        case FollowStatus::LeftMap:
            spdlog::error("simulate: robot left the map");
            return ExitCode::SimUnsafe;
        case FollowStatus::Reached:
            break;
        }
        if (result.min_h < -kSimSafetyTolerance) {
            spdlog::error("simulate: min_h {:.6g} below tolerance", result.min_h);
            return ExitCode::SimUnsafe;
        }
        return ExitCode::Ok;
    });
}

ExitCode cmd_render(const CommandOptions& opts)
{
    return guarded("render", opts, [&](Run& run) {
        run.input("map", opts.map);
        const OccupancyGrid map = read_map(opts.map);

        // optional layers: absent flag or missing file skips the layer
        auto present = [&](const std::string& path, const char* role) {
            if (path.empty()) {
                spdlog::info("render: no {} layer given, skipping", role);
                return false;
            }
            if (!fs::is_regular_file(path)) {
                spdlog::warn("render: {} file {} not found, skipping layer", role, path);
                return false;
            }
            run.input(role, path);
            return true;
        };

        RenderLayers layers;
        if (present(opts.barriers, "barriers"))
            layers.barriers = read_barriers(opts.barriers);
        if (present(opts.tree, "tree"))
            layers.tree = read_csv(opts.tree, read_tree_csv);
        if (present(opts.path, "path"))
            layers.path = read_csv(opts.path, read_path_csv);
        if (present(opts.trajectory, "trajectory"))
            layers.trajectory = read_csv(opts.trajectory, read_trajectory_csv);
        run.stage("load");

        const std::string svg = render_svg(map, layers);
        run.stage("render");
        run.write("svg", "render.svg", svg);
        run.stage("write");
        return ExitCode::Ok;
    });
}

}  // namespace safeplan::cli
