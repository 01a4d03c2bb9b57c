#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "safeplan/sim.hpp"
#include "safeplan/tree.hpp"

namespace safeplan {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Waypoint {
    RobotState state;
    double cost = 0.0;
};

struct TreeEdge {
    int parent_id = 0;
    int child_id = 0;
    Point2 from;
    Point2 to;
};

// Header lines are written and required on read:
//   path:       x1,x2,theta,cost
//   tree:       parent_id,child_id,x1_from,x2_from,x1_to,x2_to
//   trajectory: t,x1,x2,theta,omega,min_h
void write_path_csv(std::ostream& out, std::span<const Node> path);
void write_tree_csv(std::ostream& out, const Tree& tree);
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

std::vector<Waypoint> read_path_csv(std::istream& in);
std::vector<TreeEdge> read_tree_csv(std::istream& in);
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace safeplan
