#include <cstdlib>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "safeplan/cli/commands.hpp"

using safeplan::cli::CommandOptions;
using safeplan::cli::ExitCode;

namespace {

// SAFEPLAN_LOG takes a spdlog level name (trace, debug, info, warn, error, off).
void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("safeplan");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("SAFEPLAN_LOG"))
        spdlog::set_level(spdlog::level::from_str(env));
}

std::string exit_code_footer()
{
    std::string s = "Exit codes:\n";
    for (const auto& [code, what] : safeplan::cli::exit_code_table())
        s += fmt::format("  {:>2}  {}\n", static_cast<int>(code), what);
    s += "\nEnvironment:\n  SAFEPLAN_LOG  log level (trace|debug|info|warn|error|off), default info\n";
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    setup_logging();

    CLI::App app{"Polynomial barrier fitting and CBF-RRT* planning on occupancy grids"};
    app.footer(exit_code_footer());
    app.require_subcommand(1);

    CommandOptions opts;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "key = value config file");
        sub->add_option("--out", opts.out, "output directory")->required();
        sub->add_option("--seed", seed, "overrides planner.seed");
    };

    auto* fit = app.add_subcommand("fit", "fit one barrier per obstacle region");
    fit->add_option("--map", opts.map, "occupancy map (.txt ASCII or .pgm)")->required();
    common(fit);

    auto* plan = app.add_subcommand("plan", "plan a path with CBF steering");
    plan->add_option("--map", opts.map, "occupancy map")->required();
    plan->add_option("--barriers", opts.barriers, "barrier set from fit")->required();
    common(plan);

    auto* sim = app.add_subcommand("simulate", "roll out the unicycle along a path");
    sim->add_option("--path", opts.path, "path CSV from plan")->required();
    sim->add_option("--map", opts.map, "occupancy map")->required();
    sim->add_option("--barriers", opts.barriers, "barrier set from fit")->required();
    common(sim);

    auto* render = app.add_subcommand("render", "draw map, barriers, tree, path and trajectory");
    render->add_option("--map", opts.map, "occupancy map")->required();
    render->add_option("--barriers", opts.barriers, "barrier set");
    render->add_option("--tree", opts.tree, "tree CSV");
    render->add_option("--path", opts.path, "path CSV");
    render->add_option("--trajectory", opts.trajectory, "trajectory CSV");
    common(render);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::Usage);
    }

    for (auto* sub : app.get_subcommands())
        if (sub->count("--seed"))
            opts.seed = seed;

    ExitCode code = ExitCode::Usage;
    if (*fit)
        code = safeplan::cli::cmd_fit(opts);
    else if (*plan)
        code = safeplan::cli::cmd_plan(opts);
    else if (*sim)
        code = safeplan::cli::cmd_simulate(opts);
    else if (*render)
        code = safeplan::cli::cmd_render(opts);
    return static_cast<int>(code);
}
