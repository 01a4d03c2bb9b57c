#pragma once

#include <vector>

#include "safeplan/cbf.hpp"
#include "safeplan/geometry.hpp"

namespace safeplan {

struct SteerParams {
    int steps = 4;
    double dt = 1.0;  ///< seconds per small step
    double v = 0.2;   ///< m/s; small-step length is v * dt

    double step_length() const { return v * dt; }
};

enum class SteerStop {
    Completed,
    QpInfeasible,
    SafetyAudit,  ///< a discrete step landed where some active h < -tolerance
};

/// Result of one big step. chain[k] is the pose after small step k + 1; each
/// node's parent is the previous chain node (the anchor for k = 0).
struct SteerOutcome {
    std::vector<RobotState> chain;
    bool feasible = true;
    int steps_completed = 0;
    SteerStop stop = SteerStop::Completed;
};

inline constexpr double kSafetyAuditTolerance = 1e-6;

Point2 extend(const Point2& from, double theta, double step_len);
double angle_update(double omega, double theta, double dt);

/// Multi-step CBF steering. Every small step extends from the chain tail along
/// the current heading, solves the CBF-QP at that tentative position with the
/// current heading, turns by omega * dt and re-extends from the tail along the
/// new heading.
SteerOutcome cbf_steer(const SafetyFilter& filter, const RobotState& from, double theta_xs,
                       const SteerParams& params, double u_ref);

}  // namespace safeplan
