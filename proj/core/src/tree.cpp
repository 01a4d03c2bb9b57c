#include "safeplan/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace safeplan {

Tree::Tree(const RobotState& root_state)
{
    nodes_.push_back({0, root_state, std::nullopt, 0.0});
    children_.emplace_back();
    tree_ids_.push_back(0);
}

int Tree::add_node(const RobotState& state, int parent)
{
    if (parent < 0 || static_cast<std::size_t>(parent) >= nodes_.size())
        throw std::out_of_range("Tree::add_node: unknown parent");
    const int id = static_cast<int>(nodes_.size());
    const Node& p = nodes_[static_cast<std::size_t>(parent)];
    nodes_.push_back({id, state, parent, p.cost + distance(p.state.position(), state.position())});
    children_.emplace_back();
    children_[static_cast<std::size_t>(parent)].push_back(id);
    return id;
}

bool Tree::is_ancestor(int ancestor, int id) const
{
    for (std::optional<int> cur = id; cur; cur = nodes_[static_cast<std::size_t>(*cur)].parent)
        if (*cur == ancestor)
            return true;
    return false;
}

bool Tree::reparent(int id, int new_parent)
{
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.parent || is_ancestor(id, new_parent))
        return false;
    auto& old_kids = children_[static_cast<std::size_t>(*n.parent)];
    old_kids.erase(std::find(old_kids.begin(), old_kids.end(), id));
    children_[static_cast<std::size_t>(new_parent)].push_back(id);
    n.parent = new_parent;
    refresh_subtree_costs(id);
    return true;
}

void Tree::refresh_subtree_costs(int id)
{
    std::vector<int> stack{id};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        Node& n = nodes_[static_cast<std::size_t>(cur)];
        const Node& p = nodes_[static_cast<std::size_t>(*n.parent)];
        n.cost = p.cost + distance(p.state.position(), n.state.position());
        for (int c : children_[static_cast<std::size_t>(cur)])
            stack.push_back(c);
    }
}

std::vector<Node> Tree::path_to(int id) const
{
    std::vector<Node> path;
    for (std::optional<int> cur = id; cur; cur = nodes_[static_cast<std::size_t>(*cur)].parent)
        path.push_back(nodes_[static_cast<std::size_t>(*cur)]);
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace safeplan
