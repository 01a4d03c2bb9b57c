#include "safeplan/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>

#include <fmt/format.h>

namespace safeplan {

void AppConfig::sync()
{
    fit.ds = ds;
    planner.ds = ds;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(fmt::format("config: '{}' expects a number, got '{}'", key, v));
    return out;
}

long long to_integer(const std::string& key, const std::string& v)
{
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(fmt::format("config: '{}' expects an integer, got '{}'", key, v));
    return out;
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw ConfigError(fmt::format("config: '{}' expects true/false, got '{}'", key, v));
}

struct Field {
    const char* key;
    std::function<void(AppConfig&, const std::string&)> set;
    std::function<std::string(const AppConfig&)> get;
};

std::string num(double v) { return fmt::format("{}", v); }

#define SP_DOUBLE(KEY, MEMBER)                                                              \
    Field                                                                                   \
    {                                                                                       \
        KEY, [](AppConfig& c, const std::string& v) { c.MEMBER = to_double(KEY, v); },      \
            [](const AppConfig& c) { return num(c.MEMBER); }                                \
    }
#define SP_INT(KEY, MEMBER)                                                                 \
    Field                                                                                   \
    {                                                                                       \
        KEY,                                                                                \
            [](AppConfig& c, const std::string& v) {                                        \
                c.MEMBER = static_cast<decltype(c.MEMBER)>(to_integer(KEY, v));             \
            },                                                                              \
            [](const AppConfig& c) { return std::to_string(c.MEMBER); }                     \
    }

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        SP_DOUBLE("map.ds", ds),
        SP_DOUBLE("fit.spacing", fit.spacing),
        SP_DOUBLE("fit.window_margin", fit.min_window_margin),
        SP_INT("fit.max_iterations", fit.bfgs.max_iterations),
        SP_DOUBLE("fit.gradient_tolerance", fit.bfgs.gradient_tolerance),
        Field{"fit.conservative",
              [](AppConfig& c, const std::string& v) {
                  c.fit.conservative = to_bool("fit.conservative", v);
              },
              [](const AppConfig& c) { return std::string(c.fit.conservative ? "true" : "false"); }},
        SP_INT("fit.reweight_rounds", fit.reweight_rounds),
        SP_DOUBLE("fit.reweight_factor", fit.reweight_factor),
        SP_DOUBLE("planner.v", planner.v),
        SP_DOUBLE("planner.k0", planner.gains.k0),
        SP_DOUBLE("planner.k1", planner.gains.k1),
        SP_DOUBLE("planner.u_ref", planner.u_ref),
        SP_DOUBLE("planner.u_min", planner.bounds.u_min),
        SP_DOUBLE("planner.u_max", planner.bounds.u_max),
        SP_INT("planner.steps", planner.steps),
        SP_DOUBLE("planner.dt", planner.dt),
        SP_INT("planner.max_iterations", planner.max_iterations),
        SP_DOUBLE("planner.goal_radius", planner.goal_radius),
        SP_DOUBLE("planner.gamma", planner.near_radius_gamma),
        SP_DOUBLE("planner.goal_bias", planner.goal_bias),
        SP_INT("planner.seed", planner.rng_seed),
        SP_DOUBLE("planner.active_margin", planner.active_margin),
        SP_DOUBLE("planner.start_x", start.x1),
        SP_DOUBLE("planner.start_y", start.x2),
        SP_DOUBLE("planner.start_theta", start.theta),
        SP_DOUBLE("planner.goal_x", goal.x),
        SP_DOUBLE("planner.goal_y", goal.y),
        SP_DOUBLE("sim.dt", sim.dt),
        SP_DOUBLE("sim.heading_gain", sim.heading_gain),
        SP_DOUBLE("sim.capture_radius", sim.capture_radius),
        SP_DOUBLE("sim.timeout", sim.timeout),
    };
    return table;
}

#undef SP_DOUBLE
#undef SP_INT

}  // namespace

AppConfig parse_config(std::istream& in)
{
    AppConfig cfg;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError(fmt::format("config line {}: duplicate key '{}'", line_no, key));
        bool known = false;
        for (const auto& f : fields()) {
            if (key == f.key) {
                f.set(cfg, value);
                known = true;
                break;
            }
        }
        if (!known)
            throw ConfigError(fmt::format("config line {}: unknown key '{}'", line_no, key));
    }
    cfg.start.theta = wrap_angle(cfg.start.theta);
    cfg.sync();
    if (!(cfg.ds >= 0.0))
        throw ConfigError("config: map.ds must be non-negative");
    if (!(cfg.fit.spacing > 0.0))
        throw ConfigError("config: fit.spacing must be positive");
    if (!(cfg.sim.dt > 0.0) || !(cfg.sim.capture_radius > 0.0))
        throw ConfigError("config: sim.dt and sim.capture_radius must be positive");
    try {
        cfg.planner.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

AppConfig load_config(const std::string& path)
{
    if (path.empty()) {
        AppConfig cfg;
        cfg.sync();
        return cfg;
    }
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

std::string to_text(const AppConfig& config)
{
    std::string out;
    for (const auto& f : fields())
        out += fmt::format("{} = {}\n", f.key, f.get(config));
    return out;
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& f : fields())
        keys.emplace_back(f.key);
    return keys;
}

}  // namespace safeplan
