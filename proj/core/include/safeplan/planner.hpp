#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "safeplan/barrier.hpp"
#include "safeplan/cbf.hpp"
#include "safeplan/gridmap.hpp"
#include "safeplan/steering.hpp"
#include "safeplan/tree.hpp"

namespace safeplan {

struct PlannerConfig {
    double v = 0.2;
    CbfGains gains;
    double ds = 0.2;
    double u_ref = 0.0;
    InputBounds bounds;
    int steps = 4;
    double dt = 1.0;
    int max_iterations = 120;
    double goal_radius = 0.3;
    double near_radius_gamma = 5.0;
    double goal_bias = 0.05;
    std::uint64_t rng_seed = 1;
    double active_margin = 1.0;  ///< barrier activation distance beyond its window

    SteerParams steer_params() const { return {steps, dt, v}; }
    /// Throws std::invalid_argument on non-positive dimensional values.
    void validate() const;
};

/// Seeded uniform source; the [0, 1) mapping is fixed so sequences are
/// identical across platforms.
class PlannerRng {
public:
    explicit PlannerRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

Point2 sample_point(const Rect& bounds, const Point2& goal, double goal_bias, PlannerRng& rng);

/// Closest steering anchor; ties go to the lowest id.
const Node& nearest(const Tree& tree, const Point2& p);

/// Heading from the node toward p; the node's own heading when p coincides.
double steer_heading(const Node& from, const Point2& p);

/// min(gamma * sqrt(ln N / N), cap) with N = all_nodes count.
double near_radius(std::size_t node_count, double gamma, double cap);

/// Ids of all nodes within `radius` of p, ascending, excluding `exclude`.
std::vector<int> near_indices(const Tree& tree, const Point2& p, double radius, int exclude = -1);

struct ParentChoice {
    int parent = 0;
    double cost = 0.0;
};

/// Lowest-cost parent among the steering parent and the collision-free near
/// nodes (strict improvement required to leave the steering parent).
ParentChoice choose_parent(const Tree& tree, const Point2& position, int steering_parent,
                           std::span<const int> near_ids, const OccupancyGrid& grid);

/// Reconnects near nodes through `id` when that strictly lowers their cost.
/// Returns the number of rewired nodes.
int rewire(Tree& tree, int id, std::span<const int> near_ids, const OccupancyGrid& grid);

class PlanningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PlanStats {
    int qp_infeasible = 0;
    int audit_truncations = 0;
    int grid_truncations = 0;
    int rewired = 0;
};

struct PlanResult {
    std::vector<Node> path;
    int iterations_used = 0;
    Tree tree;
    bool found = false;
    int first_found_iteration = -1;       ///< 1-based iteration, -1 if never
    int goal_node = -1;
    std::vector<double> best_cost_history;  ///< best goal cost after each iteration (+inf before)
    PlanStats stats;
};

/// Sampling-based planning with multi-step CBF steering and RRT* parent
/// selection/rewiring over all nodes. `inflated` is the map already grown by
/// the safety distance. Throws PlanningError when the start is not safe.
PlanResult plan(const OccupancyGrid& inflated, std::span<const BarrierFunction> barriers,
                const PlannerConfig& config, const RobotState& start, const Point2& goal);

}  // namespace safeplan
