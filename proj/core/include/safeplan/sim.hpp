#pragma once

#include <span>
#include <vector>

#include "safeplan/cbf.hpp"
#include "safeplan/gridmap.hpp"

namespace safeplan {

struct TrajectorySample {
    double t = 0.0;
    RobotState state;
    double omega = 0.0;
    double min_h = 0.0;  ///< +inf when no barrier is active
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
};

/// Forward-Euler step of x' = v cos(theta), y' = v sin(theta), theta' = omega.
RobotState step_dynamics(const RobotState& s, double omega, double v, double dt);

struct FollowOptions {
    double dt = 0.01;
    double heading_gain = 1.5;    ///< 1/s
    double capture_radius = 0.15; ///< m
    double timeout = 0.0;         ///< s; <= 0 picks 3 * path_length / v + 20
};

enum class FollowStatus { Reached, Timeout, QpInfeasible, LeftMap };

struct FollowResult {
    Trajectory trajectory;
    FollowStatus status = FollowStatus::Timeout;
    double min_h = 0.0;            ///< over the executed trajectory
    std::size_t occupied_steps = 0; ///< samples whose position lies in an occupied cell
};

/// Heading-controller rollout through the waypoints with the CBF-QP filter
/// applied to every command. Starts at the first waypoint with its heading.
/// Throws std::invalid_argument on an empty path.
FollowResult follow_path(std::span<const RobotState> path, const SafetyFilter& filter,
                         const OccupancyGrid& grid, double v, const FollowOptions& options = {});

}  // namespace safeplan
