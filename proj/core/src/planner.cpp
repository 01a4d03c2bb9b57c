#include "safeplan/planner.hpp"

#include <algorithm>
#include <cmath>

namespace safeplan {

void PlannerConfig::validate() const
{
    const auto positive = [](double value, const char* what) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw std::invalid_argument(std::string("planner config: ") + what +
                                        " must be positive");
    };
    positive(v, "v");
    positive(gains.k0, "k0");
    positive(gains.k1, "k1");
    positive(dt, "dt");
    positive(goal_radius, "goal_radius");
    positive(near_radius_gamma, "gamma");
    if (!(ds >= 0.0))
        throw std::invalid_argument("planner config: ds must be non-negative");
    if (steps < 1)
        throw std::invalid_argument("planner config: steps must be >= 1");
    if (max_iterations < 1)
        throw std::invalid_argument("planner config: max_iterations must be >= 1");
    if (!(bounds.u_min <= bounds.u_max))
        throw std::invalid_argument("planner config: u_min must not exceed u_max");
    if (!(goal_bias >= 0.0 && goal_bias < 1.0))
        throw std::invalid_argument("planner config: goal_bias must lie in [0, 1)");
    if (!(active_margin >= 0.0))
        throw std::invalid_argument("planner config: active_margin must be non-negative");
}

Point2 sample_point(const Rect& bounds, const Point2& goal, double goal_bias, PlannerRng& rng)
{
    if (rng.uniform() < goal_bias)
        return goal;
    const double x = rng.uniform(bounds.min_x, bounds.max_x);
    const double y = rng.uniform(bounds.min_y, bounds.max_y);
    return {x, y};
}

const Node& nearest(const Tree& tree, const Point2& p)
{
    const auto& ids = tree.tree_ids();
    int best = ids.front();
    double best_d = distance(tree.node(best).state.position(), p);
    for (int id : ids) {
        const double d = distance(tree.node(id).state.position(), p);
        if (d < best_d || (d == best_d && id < best)) {
            best = id;
            best_d = d;
        }
    }
    return tree.node(best);
}

double steer_heading(const Node& from, const Point2& p)
{
    const double dx = p.x - from.state.x1;
    const double dy = p.y - from.state.x2;
    if (dx == 0.0 && dy == 0.0)
        return from.state.theta;
    return std::atan2(dy, dx);
}

double near_radius(std::size_t node_count, double gamma, double cap)
{
    if (node_count < 2)
        return 0.0;
    const double n = static_cast<double>(node_count);
    return std::min(gamma * std::sqrt(std::log(n) / n), cap);
}

std::vector<int> near_indices(const Tree& tree, const Point2& p, double radius, int exclude)
{
    std::vector<int> out;
    for (const auto& n : tree.all_nodes())
        if (n.id != exclude && distance(n.state.position(), p) <= radius)
            out.push_back(n.id);
    return out;
}

ParentChoice choose_parent(const Tree& tree, const Point2& position, int steering_parent,
                           std::span<const int> near_ids, const OccupancyGrid& grid)
{
    const Node& sp = tree.node(steering_parent);
    ParentChoice best{steering_parent, sp.cost + distance(sp.state.position(), position)};
    for (int id : near_ids) {
        if (id == steering_parent)
            continue;
        const Node& cand = tree.node(id);
        const double c = cand.cost + distance(cand.state.position(), position);
        if (c < best.cost && segment_collision_free(grid, cand.state.position(), position))
            best = {id, c};
    }
    return best;
}

int rewire(Tree& tree, int id, std::span<const int> near_ids, const OccupancyGrid& grid)
{
    int count = 0;
    for (int m : near_ids) {
        if (m == id)
            continue;
        const Node& n = tree.node(id);
        const Node& near = tree.node(m);
        if (!near.parent)
            continue;
        const double via = n.cost + distance(n.state.position(), near.state.position());
        if (!(via < near.cost))
            continue;
        if (tree.is_ancestor(m, id))
            continue;
        if (!segment_collision_free(grid, n.state.position(), near.state.position()))
            continue;
        if (tree.reparent(m, id))
            ++count;
    }
    return count;
}

PlanResult plan(const OccupancyGrid& inflated, std::span<const BarrierFunction> barriers,
                const PlannerConfig& config, const RobotState& start, const Point2& goal)
{
    config.validate();
    if (!inflated.free_at(start.position()))
        throw PlanningError("start lies in an occupied cell of the inflated map");
    if (min_active_h(barriers, start.position(), config.active_margin) < 0.0)
        throw PlanningError("start violates a barrier (h < 0)");

    const SafetyFilter filter{barriers, config.gains, config.bounds, config.active_margin};
    const SteerParams steer = config.steer_params();
    const double radius_cap = steer.steps * steer.step_length();
    const Rect bounds = inflated.bounds();

    PlanResult result{{}, 0, Tree(start), false, -1, -1, {}, {}};
    Tree& tree = result.tree;
    PlannerRng rng(config.rng_seed);
    std::vector<int> goal_nodes;
    result.best_cost_history.reserve(static_cast<std::size_t>(config.max_iterations));

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        result.iterations_used = iter;
        const Point2 xs = sample_point(bounds, goal, config.goal_bias, rng);
        const Node& near_anchor = nearest(tree, xs);
        const int anchor_id = near_anchor.id;
        const double theta_xs = steer_heading(near_anchor, xs);
        SteerOutcome out = cbf_steer(filter, near_anchor.state, theta_xs, steer, config.u_ref);
        if (out.stop == SteerStop::QpInfeasible)
            ++result.stats.qp_infeasible;
        else if (out.stop == SteerStop::SafetyAudit)
            ++result.stats.audit_truncations;

        // Geometric audit of the steered chain against the inflated map.
        Point2 prev = tree.node(anchor_id).state.position();
        for (std::size_t k = 0; k < out.chain.size(); ++k) {
            const Point2 p = out.chain[k].position();
            if (!inflated.free_at(p) || !segment_collision_free(inflated, prev, p)) {
                out.chain.resize(k);
                out.feasible = false;
                ++result.stats.grid_truncations;
                break;
            }
            prev = p;
        }

        int steering_parent = anchor_id;
        for (std::size_t k = 0; k < out.chain.size(); ++k) {
            const RobotState& s = out.chain[k];
            const double r = near_radius(tree.size(), config.near_radius_gamma, radius_cap);
            const auto near = near_indices(tree, s.position(), r);
            const ParentChoice choice =
                choose_parent(tree, s.position(), steering_parent, near, inflated);
            const int id = tree.add_node(s, choice.parent);
            result.stats.rewired += rewire(tree, id, near, inflated);
            if (out.feasible && k + 1 == out.chain.size())
                tree.add_anchor(id);
            if (distance(s.position(), goal) <= config.goal_radius)
                goal_nodes.push_back(id);
            steering_parent = id;
        }

        double best = std::numeric_limits<double>::infinity();
        for (int g : goal_nodes) {
            if (tree.node(g).cost < best) {
                best = tree.node(g).cost;
                result.goal_node = g;
            }
        }
        if (!goal_nodes.empty() && result.first_found_iteration < 0)
            result.first_found_iteration = iter;
        result.best_cost_history.push_back(best);
    }

    result.found = result.goal_node >= 0;
    if (result.found)
        result.path = tree.path_to(result.goal_node);
    return result;
}

}  // namespace safeplan
