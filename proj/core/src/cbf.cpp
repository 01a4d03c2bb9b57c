#include "safeplan/cbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace safeplan {

BarrierDerivatives barrier_derivatives(const BarrierFunction& bf, const RobotState& s, double v)
{
    const FeatureVector& beta = bf.beta;
    const FeatureGradient g = features_gradient(s.x1, s.x2);
    const FeatureHessian hz = features_hessian(s.x1, s.x2);
    const double c = std::cos(s.theta);
    const double sn = std::sin(s.theta);

    const double h_x1 = beta.dot(g.d_x1);
    const double h_x2 = beta.dot(g.d_x2);

    BarrierDerivatives d;
    d.h = eval_h(bf, s.x1, s.x2);
    d.h_dot = v * (h_x1 * c + h_x2 * sn);
    d.lf2_h = v * v *
              (beta.dot(hz.d_x1x1) * c * c + 2.0 * beta.dot(hz.d_x1x2) * sn * c +
               beta.dot(hz.d_x2x2) * sn * sn);
    d.lg_lf_h = v * (-h_x1 * sn + h_x2 * c);
    return d;
}

LinearConstraint constraint_coeffs(const BarrierFunction& bf, const RobotState& s, double v,
                                   const CbfGains& gains)
{
    const BarrierDerivatives d = barrier_derivatives(bf, s, v);
    return {d.lg_lf_h, d.lf2_h + gains.k1 * d.h_dot + gains.k0 * d.h, bf.region_id};
}

QpSolution solve_qp(std::span<const LinearConstraint> constraints, double u_ref,
                    const InputBounds& bounds)
{
    QpSolution sol;
    if (!std::isfinite(u_ref) || !std::isfinite(bounds.u_min) || !std::isfinite(bounds.u_max) ||
        bounds.u_min > bounds.u_max) {
        sol.status = QpStatus::InvalidInput;
        return sol;
    }

    double lo = bounds.u_min;
    double hi = bounds.u_max;
    for (const auto& c : constraints) {
        if (!std::isfinite(c.a) || !std::isfinite(c.b)) {
            sol.status = QpStatus::InvalidInput;
            return sol;
        }
        if (c.a == 0.0) {
            if (c.b < 0.0) {
                sol.status = QpStatus::Infeasible;
                sol.lower = lo;
                sol.upper = hi;
                return sol;
            }
            continue;
        }
        const double root = -c.b / c.a;
        if (c.a > 0.0)
            lo = std::max(lo, root);
        else
            hi = std::min(hi, root);
    }

    sol.lower = lo;
    sol.upper = hi;
    if (hi - lo < -kQpIntervalTolerance) {
        sol.status = QpStatus::Infeasible;
        return sol;
    }
    if (lo > hi) {
        // within tolerance: collapse to the single feasible point
        const double mid = 0.5 * (lo + hi);
        lo = hi = mid;
    }
    sol.u = std::clamp(u_ref, lo, hi);
    return sol;
}

std::vector<std::size_t> active_barriers(std::span<const BarrierFunction> barriers,
                                         const Point2& p, double margin)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < barriers.size(); ++k)
        if (barriers[k].window.expanded(margin).contains(p))
            out.push_back(k);
    return out;
}

double min_active_h(std::span<const BarrierFunction> barriers, const Point2& p, double margin)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& bf : barriers)
        if (bf.window.expanded(margin).contains(p))
            m = std::min(m, eval_h(bf, p.x, p.y));
    return m;
}

QpSolution SafetyFilter::filter(const RobotState& s, double v, double u_ref) const
{
    std::vector<LinearConstraint> cons;
    for (const auto& bf : barriers)
        if (bf.window.expanded(active_margin).contains(s.position()))
            cons.push_back(constraint_coeffs(bf, s, v, gains));
    return solve_qp(cons, u_ref, bounds);
}

}  // namespace safeplan
