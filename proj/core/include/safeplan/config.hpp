#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "safeplan/barrier.hpp"
#include "safeplan/planner.hpp"
#include "safeplan/sim.hpp"

namespace safeplan {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a run needs. Text form is flat `section.key = value` lines;
/// see docs/formats.md for the key list.
struct AppConfig {
    double ds = 0.2;  ///< map.ds, obstacle inflation radius (m)
    BarrierFitOptions fit;
    PlannerConfig planner;
    RobotState start{0.9, 0.8, 0.0};
    Point2 goal{7.45, 6.8};
    FollowOptions sim;

    /// Copies shared values (ds) into the per-module option blocks.
    void sync();
};

/// Strict parser: unknown or repeated keys and unparsable values are errors.
/// Keys not present keep their defaults.
AppConfig parse_config(std::istream& in);
AppConfig load_config(const std::string& path);

/// Canonical text with every key, in documentation order.
std::string to_text(const AppConfig& config);

/// Supported keys in documentation order.
std::vector<std::string> config_keys();

}  // namespace safeplan
