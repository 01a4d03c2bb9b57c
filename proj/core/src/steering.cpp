#include "safeplan/steering.hpp"

#include <cmath>

namespace safeplan {

Point2 extend(const Point2& from, double theta, double step_len)
{
    return {from.x + step_len * std::cos(theta), from.y + step_len * std::sin(theta)};
}

double angle_update(double omega, double theta, double dt)
{
    return wrap_angle(theta + omega * dt);
}

SteerOutcome cbf_steer(const SafetyFilter& filter, const RobotState& from, double theta_xs,
                       const SteerParams& params, double u_ref)
{
    SteerOutcome out;
    out.chain.reserve(static_cast<std::size_t>(params.steps));
    const double len = params.step_length();

    RobotState tail = from;
    double theta = wrap_angle(theta_xs);
    for (int i = 0; i < params.steps; ++i) {
        const Point2 tentative = extend(tail.position(), theta, len);
        const QpSolution qp = filter.filter({tentative.x, tentative.y, theta}, params.v, u_ref);
        if (!qp.ok()) {
            out.feasible = false;
            out.stop = SteerStop::QpInfeasible;
            break;
        }
        const double theta_new = angle_update(qp.u, theta, params.dt);
        const Point2 next = extend(tail.position(), theta_new, len);
        if (min_active_h(filter.barriers, next, filter.active_margin) < -kSafetyAuditTolerance) {
            out.feasible = false;
            out.stop = SteerStop::SafetyAudit;
            break;
        }
        tail = {next.x, next.y, theta_new};
        out.chain.push_back(tail);
        theta = theta_new;
    }
    out.steps_completed = static_cast<int>(out.chain.size());
    return out;
}

}  // namespace safeplan
