#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "khier/common.hpp"

namespace khier {

using NodeId = std::size_t;

/// One node of a key hierarchy. Leaves carry a member and no children;
/// internal nodes carry children and an empty member.
struct HierarchyNode {
  MemberId member;
  std::vector<NodeId> children;

  bool is_leaf() const { return children.empty(); }
  friend bool operator==(const HierarchyNode&, const HierarchyNode&) = default;
};

/// Rooted tree of auxiliary keys whose leaves are group members.
///
/// Nodes live in an arena and are addressed by index. The arena is not
/// required to be a valid tree: parsers build it verbatim and
/// validate_hierarchy() reports what is wrong with it. Every evaluation entry
/// point re-checks the tree shape before walking it.
class Hierarchy {
 public:
  Hierarchy() : nodes_{HierarchyNode{}}, root_(0) {}

  static Hierarchy leaf(MemberId member) {
    Hierarchy h;
    h.nodes_[0].member = std::move(member);
    return h;
  }

  /// Builds from a raw arena without checking anything.
  static Hierarchy from_nodes(std::vector<HierarchyNode> nodes, NodeId root) {
    Hierarchy h;
    h.nodes_ = std::move(nodes);
    h.root_ = root;
    return h;
  }

  NodeId root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  const HierarchyNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<HierarchyNode>& nodes() const { return nodes_; }

  bool is_leaf() const { return nodes_[root_].is_leaf(); }

  /// Structural equality: same shape, same members, same child order.
  /// Arena layout is ignored.
  friend bool operator==(const Hierarchy& a, const Hierarchy& b) {
    return equal_from(a, a.root_, b, b.root_);
  }

 private:
  static bool equal_from(const Hierarchy& a, NodeId x, const Hierarchy& b, NodeId y) {
    const auto& nx = a.nodes_[x];
    const auto& ny = b.nodes_[y];
    if (nx.member != ny.member || nx.children.size() != ny.children.size()) return false;
    for (std::size_t i = 0; i < nx.children.size(); ++i)
      if (!equal_from(a, nx.children[i], b, ny.children[i])) return false;
    return true;
  }

  std::vector<HierarchyNode> nodes_;
  NodeId root_;
};

namespace detail {

/// Post-order over a hierarchy that must be a proper tree. Throws
/// ValidationError on out-of-range ids, shared nodes or cycles.
inline std::vector<NodeId> checked_postorder(const Hierarchy& h) {
  const auto n = h.size();
  if (h.root() >= n) throw ValidationError("hierarchy root out of range");
  std::vector<char> seen(n, 0);
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<std::pair<NodeId, std::size_t>> stack{{h.root(), 0}};
  seen[h.root()] = 1;
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const auto& node = h.node(id);
    if (next < node.children.size()) {
      const auto child = node.children[next++];
      if (child >= n) throw ValidationError("hierarchy child id out of range");
      if (seen[child]) throw ValidationError("hierarchy is not a tree");
      seen[child] = 1;
      stack.emplace_back(child, 0);
    } else {
      order.push_back(id);
      stack.pop_back();
    }
  }
  return order;
}

inline std::vector<NodeId> parents_of(const Hierarchy& h) {
  std::vector<NodeId> parent(h.size(), h.size());
  for (NodeId id = 0; id < h.size(); ++id)
    for (auto c : h.node(id).children) parent[c] = id;
  return parent;
}

}  // namespace detail

/// Leaf members in left-to-right order.
inline std::vector<MemberId> leaf_members(const Hierarchy& h) {
  std::vector<MemberId> out;
  for (auto id : detail::checked_postorder(h))
    if (h.node(id).is_leaf()) out.push_back(h.node(id).member);
  return out;
}

/// Nodes reachable from the root in pre-order, with their depth.
inline std::vector<std::pair<NodeId, std::size_t>> preorder_with_depth(const Hierarchy& h) {
  detail::checked_postorder(h);
  std::vector<std::pair<NodeId, std::size_t>> out;
  std::vector<std::pair<NodeId, std::size_t>> stack{{h.root(), 0}};
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    out.emplace_back(id, depth);
    const auto& ch = h.node(id).children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, depth + 1);
  }
  return out;
}

/// New root over the given parts, in order. Part arenas are appended in
/// sequence, so node ids of part i are shifted by the sizes of parts before it.
inline Hierarchy combine(std::span<const Hierarchy> parts) {
  if (parts.empty()) throw ValidationError("combine: empty list of hierarchies");
  std::set<MemberId> seen;
  for (const auto& p : parts)
    for (auto& m : leaf_members(p))
      if (!seen.insert(m).second)
        throw ValidationError("combine: member '" + m + "' appears in more than one part");

  std::vector<HierarchyNode> nodes;
  HierarchyNode root;
  for (const auto& p : parts) {
    const auto offset = nodes.size();
    for (auto node : p.nodes()) {
      for (auto& c : node.children) c += offset;
      nodes.push_back(std::move(node));
    }
    root.children.push_back(p.root() + offset);
  }
  nodes.push_back(std::move(root));
  const auto root_id = nodes.size() - 1;
  return Hierarchy::from_nodes(std::move(nodes), root_id);
}

inline Hierarchy combine(std::initializer_list<Hierarchy> parts) {
  return combine(std::span<const Hierarchy>(parts.begin(), parts.size()));
}

/// Grafts `guest` into `host` at node `at`. An internal node gets the guest
/// root as its last child; a leaf is replaced by a new internal node whose
/// children are the old leaf and the guest root.
inline Hierarchy attach_at(const Hierarchy& host, NodeId at, const Hierarchy& guest) {
  detail::checked_postorder(host);
  auto nodes = host.nodes();
  if (at >= nodes.size()) throw ValidationError("attach_at: node id out of range");
  const auto offset = nodes.size();
  for (auto node : guest.nodes()) {
    for (auto& c : node.children) c += offset;
    nodes.push_back(std::move(node));
  }
  const auto guest_root = guest.root() + offset;
  auto root = host.root();
  if (!nodes[at].is_leaf()) {
    nodes[at].children.push_back(guest_root);
  } else {
    // The splice node takes over the leaf's slot; the leaf moves to the end.
    nodes.push_back(nodes[at]);
    const auto moved_leaf = nodes.size() - 1;
    nodes[at] = HierarchyNode{{}, {moved_leaf, guest_root}};
  }
  return Hierarchy::from_nodes(std::move(nodes), root);
}

/// Sum of weights over the leaves of h.
inline Weight hierarchy_weight(const Hierarchy& h, const WeightMap& weights) {
  Weight total = 0;
  for (const auto& m : leaf_members(h)) {
    auto it = weights.find(m);
    if (it == weights.end()) throw ValidationError("unknown member '" + m + "'");
    total = checked_add(total, it->second);
  }
  return total;
}

struct Violation {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks the tree invariants and that the leaves are exactly `members`.
/// Returns every problem found; degree-1 internal nodes are warnings.
inline std::vector<Violation> validate_hierarchy(const Hierarchy& h,
                                                 std::span<const MemberId> members) {
  std::vector<Violation> out;
  auto error = [&](std::string m) { out.push_back({Violation::Severity::error, std::move(m)}); };
  const auto n = h.size();
  if (h.root() >= n) {
    error("root id out of range");
    return out;
  }

  std::vector<std::size_t> parents(n, 0);
  bool ids_ok = true;
  for (NodeId id = 0; id < n; ++id) {
    for (auto c : h.node(id).children) {
      if (c >= n) {
        error("node " + std::to_string(id) + " references unknown node " + std::to_string(c));
        ids_ok = false;
        continue;
      }
      ++parents[c];
    }
  }
  if (!ids_ok) return out;
  if (parents[h.root()] != 0) error("not a tree: root has a parent");

  for (NodeId id = 0; id < n; ++id) {
    if (id != h.root() && parents[id] > 1) {
      error("not a tree: node " + std::to_string(id) + " has " + std::to_string(parents[id]) +
            " parents");
    }
  }
  // Reachability from the root also catches cycles that exclude the root.
  std::vector<char> reached(n, 0);
  std::vector<NodeId> stack{h.root()};
  reached[h.root()] = 1;
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    for (auto c : h.node(id).children)
      if (!reached[c]) {
        reached[c] = 1;
        stack.push_back(c);
      }
  }
  for (NodeId id = 0; id < n; ++id)
    if (!reached[id])
      error("not a tree: node " + std::to_string(id) + " is unreachable from the root");

  std::multiset<MemberId> leaves;
  for (NodeId id = 0; id < n; ++id) {
    const auto& node = h.node(id);
    if (node.is_leaf()) {
      if (node.member.empty())
        error("node " + std::to_string(id) + " has no children and no member");
      else
        leaves.insert(node.member);
    } else {
      if (!node.member.empty())
        error("internal node " + std::to_string(id) + " carries member '" + node.member + "'");
      if (node.children.size() == 1)
        out.push_back({Violation::Severity::warning,
                       "internal node " + std::to_string(id) + " has a single child"});
    }
  }

  std::set<MemberId> expected(members.begin(), members.end());
  for (auto it = leaves.begin(); it != leaves.end(); it = leaves.upper_bound(*it)) {
    if (leaves.count(*it) > 1) error("member " + *it + " appears on more than one leaf");
    if (!expected.count(*it)) error("unknown member " + *it);
  }
  for (const auto& m : expected)
    if (!leaves.count(m)) error("missing member " + m);
  return out;
}

inline bool has_errors(std::span<const Violation> vs) {
  return std::any_of(vs.begin(), vs.end(),
                     [](const Violation& v) { return v.severity == Violation::Severity::error; });
}

}  // namespace khier
