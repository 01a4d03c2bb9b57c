#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "safeplan/cbf.hpp"

namespace safeplan {

struct Node {
    int id = 0;
    RobotState state;
    std::optional<int> parent;
    double cost = 0.0;  ///< path length from the root, meters
};

/// Search tree with two node lists: every node (all_nodes, indexed by id) and
/// the subset of big-step endpoints used as steering anchors (tree_ids).
class Tree {
public:
    explicit Tree(const RobotState& root_state);

    const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const std::vector<Node>& all_nodes() const { return nodes_; }
    const std::vector<int>& tree_ids() const { return tree_ids_; }
    const std::vector<int>& children(int id) const
    {
        return children_[static_cast<std::size_t>(id)];
    }
    std::size_t size() const { return nodes_.size(); }

    /// Appends a node under `parent`, cost = parent.cost + planar edge length.
    int add_node(const RobotState& state, int parent);
    void add_anchor(int id) { tree_ids_.push_back(id); }

    /// Moves `id` under `new_parent` and recomputes the costs of its subtree.
    /// Refuses (returns false) when new_parent lies in id's subtree.
    bool reparent(int id, int new_parent);

    bool is_ancestor(int ancestor, int id) const;

    /// Root-to-node states following parent links.
    std::vector<Node> path_to(int id) const;

private:
    void refresh_subtree_costs(int id);

    std::vector<Node> nodes_;
    std::vector<std::vector<int>> children_;
    std::vector<int> tree_ids_;
};

}  // namespace safeplan
