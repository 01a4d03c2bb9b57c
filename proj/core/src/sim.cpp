#include "safeplan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace safeplan {

RobotState step_dynamics(const RobotState& s, double omega, double v, double dt)
{
    return {s.x1 + v * std::cos(s.theta) * dt, s.x2 + v * std::sin(s.theta) * dt,
            wrap_angle(s.theta + omega * dt)};
}

FollowResult follow_path(std::span<const RobotState> path, const SafetyFilter& filter,
                         const OccupancyGrid& grid, double v, const FollowOptions& options)
{
    if (path.empty())
        throw std::invalid_argument("follow_path: empty path");
    if (!(options.dt > 0.0) || !(v > 0.0))
        throw std::invalid_argument("follow_path: dt and v must be positive");

    double length = 0.0;
    for (std::size_t k = 1; k < path.size(); ++k)
        length += distance(path[k - 1].position(), path[k].position());
    const double timeout = options.timeout > 0.0 ? options.timeout : 3.0 * length / v + 20.0;
    const auto max_steps = static_cast<long>(std::ceil(timeout / options.dt));

    FollowResult out;
    out.min_h = std::numeric_limits<double>::infinity();
    RobotState s = path.front();
    std::size_t active = std::min<std::size_t>(1, path.size() - 1);

    const auto record = [&](long step, double omega) {
        const double h = min_active_h(filter.barriers, s.position(), filter.active_margin);
        out.trajectory.samples.push_back({static_cast<double>(step) * options.dt, s, omega, h});
        out.min_h = std::min(out.min_h, h);
        if (!grid.free_at(s.position()))
            ++out.occupied_steps;
    };

    for (long step = 0;; ++step) {
        while (active + 1 < path.size() &&
               distance(s.position(), path[active].position()) <= options.capture_radius)
            ++active;
        if (active + 1 == path.size() &&
            distance(s.position(), path[active].position()) <= options.capture_radius) {
            record(step, 0.0);
            out.status = FollowStatus::Reached;
            break;
        }
        if (step >= max_steps) {
            record(step, 0.0);
            out.status = FollowStatus::Timeout;
            break;
        }
        if (!grid.bounds().contains(s.position())) {
            record(step, 0.0);
            out.status = FollowStatus::LeftMap;
            break;
        }

        const Point2 target = path[active].position();
        const double bearing = std::atan2(target.y - s.x2, target.x - s.x1);
        const double u_ref = std::clamp(options.heading_gain * wrap_angle(bearing - s.theta),
                                        filter.bounds.u_min, filter.bounds.u_max);
        const QpSolution qp = filter.filter(s, v, u_ref);
        if (!qp.ok()) {
            record(step, 0.0);
            out.status = FollowStatus::QpInfeasible;
            break;
        }
        record(step, qp.u);
        s = step_dynamics(s, qp.u, v, options.dt);
    }
    return out;
}

}  // namespace safeplan
