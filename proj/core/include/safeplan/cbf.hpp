#pragma once

#include <span>
#include <vector>

#include "safeplan/barrier.hpp"
#include "safeplan/geometry.hpp"

namespace safeplan {

/// Planar unicycle pose.
struct RobotState {
    double x1 = 0.0;
    double x2 = 0.0;
    double theta = 0.0;  ///< radians, (-pi, pi]

    Point2 position() const { return {x1, x2}; }
    friend bool operator==(const RobotState&, const RobotState&) = default;
};

struct CbfGains {
    double k0 = 4.0;  ///< 1/s^2
    double k1 = 2.0;  ///< 1/s
};

struct InputBounds {
    double u_min = -1.0;  ///< rad/s
    double u_max = 1.0;   ///< rad/s
};

/// a * u + b >= 0
struct LinearConstraint {
    double a = 0.0;
    double b = 0.0;
    int region_id = 0;
};

/// Barrier terms along the unicycle flow at constant speed v.
struct BarrierDerivatives {
    double h = 0.0;
    double h_dot = 0.0;     ///< L_f h
    double lf2_h = 0.0;     ///< L_f^2 h
    double lg_lf_h = 0.0;   ///< L_g L_f h, coefficient of u
};

BarrierDerivatives barrier_derivatives(const BarrierFunction& bf, const RobotState& s, double v);

/// Relative-degree-2 condition  L_f^2 h + L_g L_f h u + k1 L_f h + k0 h >= 0
/// in affine form a u + b >= 0.
LinearConstraint constraint_coeffs(const BarrierFunction& bf, const RobotState& s, double v,
                                   const CbfGains& gains);

enum class QpStatus { Optimal, Infeasible, InvalidInput };

struct QpSolution {
    QpStatus status = QpStatus::Optimal;
    double u = 0.0;
    double lower = 0.0;  ///< feasible interval found by the solver
    double upper = 0.0;

    bool ok() const { return status == QpStatus::Optimal; }
};

/// Interval tolerance for feasibility; absorbs rounding at a single feasible point.
inline constexpr double kQpIntervalTolerance = 1e-9;

/// Exact minimizer of (u - u_ref)^2 subject to every constraint and the input
/// bounds: the projection of u_ref onto the feasible interval.
QpSolution solve_qp(std::span<const LinearConstraint> constraints, double u_ref,
                    const InputBounds& bounds);

/// Barriers that take part in the QP at `p`: those whose training window,
/// grown by `margin`, contains p.
std::vector<std::size_t> active_barriers(std::span<const BarrierFunction> barriers,
                                         const Point2& p, double margin);

/// Minimum h over active barriers, +inf when none is active.
double min_active_h(std::span<const BarrierFunction> barriers, const Point2& p, double margin);

struct SafetyFilter {
    std::span<const BarrierFunction> barriers;
    CbfGains gains;
    InputBounds bounds;
    double active_margin = 1.0;

    /// Assembles constraints from barriers active at s.position() and solves.
    QpSolution filter(const RobotState& s, double v, double u_ref) const;
};

}  // namespace safeplan
