#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "khier/common.hpp"
#include "khier/hierarchy.hpp"

namespace khier {

/// Multicast cost M(Y) from the controller to a member subset.
///
/// Subsets are passed sorted and duplicate-free. Implementations must return 0
/// for the empty subset.
class MulticastOracle {
 public:
  virtual ~MulticastOracle() = default;
  virtual Cost cost(std::span<const MemberId> subset) const = 0;
  /// True when every non-empty subset costs the same.
  virtual bool is_uniform() const { return false; }
};

/// M(Y) = unit for every non-empty Y.
class UniformOracle final : public MulticastOracle {
 public:
  explicit UniformOracle(Cost unit = 1) : unit_(unit) {}
  Cost cost(std::span<const MemberId> subset) const override { return subset.empty() ? 0 : unit_; }
  bool is_uniform() const override { return true; }

 private:
  Cost unit_;
};

struct CostBreakdown {
  Cost total = 0;
  std::map<MemberId, Cost> per_member;  // unweighted per-update cost
  std::vector<Cost> per_node;           // indexed by NodeId; 0 for leaves
};

namespace detail {

/// Sorted leaf set below every node, indexed by NodeId.
inline std::vector<std::vector<MemberId>> leaf_sets(const Hierarchy& h,
                                                    const std::vector<NodeId>& postorder) {
  std::vector<std::vector<MemberId>> sets(h.size());
  for (auto id : postorder) {
    const auto& node = h.node(id);
    if (node.is_leaf()) {
      if (node.member.empty()) throw ValidationError("leaf without member");
      sets[id] = {node.member};
      continue;
    }
    auto& mine = sets[id];
    for (auto c : node.children) mine.insert(mine.end(), sets[c].begin(), sets[c].end());
    std::sort(mine.begin(), mine.end());
  }
  return sets;
}

/// Σ over children v of M(T_v), per node.
inline std::vector<Cost> child_multicast_sums(const Hierarchy& h,
                                              const std::vector<NodeId>& postorder,
                                              const std::vector<std::vector<MemberId>>& sets,
                                              const MulticastOracle& oracle) {
  // The root's own leaf set is never multicast to, so it is not queried.
  std::vector<Cost> node_m(h.size(), 0);
  for (auto id : postorder)
    if (id != h.root()) node_m[id] = oracle.cost(sets[id]);
  std::vector<Cost> sums(h.size(), 0);
  for (auto id : postorder)
    for (auto c : h.node(id).children) sums[id] = checked_add(sums[id], node_m[c]);
  return sums;
}

}  // namespace detail

/// Per-update cost of member x: the sum, over every ancestor u of x, of the
/// multicast costs to the leaf sets of u's children.
inline Cost eval_cost_member(const Hierarchy& h, const MemberId& x, const MulticastOracle& oracle) {
  const auto order = detail::checked_postorder(h);
  NodeId leaf = h.size();
  for (auto id : order)
    if (h.node(id).is_leaf() && h.node(id).member == x) leaf = id;
  if (leaf == h.size()) throw ValidationError("member '" + x + "' is not a leaf of the hierarchy");

  const auto parent = detail::parents_of(h);
  const auto sets = detail::leaf_sets(h, order);
  Cost total = 0;
  for (auto u = parent[leaf]; u != h.size(); u = parent[u])
    for (auto c : h.node(u).children) total = checked_add(total, oracle.cost(sets[c]));
  return total;
}

/// Total weighted cost via the per-node form: each node u contributes
/// W(T_u) * Σ_{child v} M(T_v). Also fills the per-member (unweighted) costs.
inline CostBreakdown eval_cost_total(const Hierarchy& h, const WeightMap& weights,
                                     const MulticastOracle& oracle) {
  const auto order = detail::checked_postorder(h);
  const auto sets = detail::leaf_sets(h, order);
  const auto sums = detail::child_multicast_sums(h, order, sets, oracle);

  CostBreakdown out;
  out.per_node.assign(h.size(), 0);
  std::vector<Weight> subtree_weight(h.size(), 0);
  for (auto id : order) {
    const auto& node = h.node(id);
    if (node.is_leaf()) {
      auto it = weights.find(node.member);
      if (it == weights.end()) throw ValidationError("unknown member '" + node.member + "'");
      subtree_weight[id] = it->second;
      continue;
    }
    for (auto c : node.children) subtree_weight[id] = checked_add(subtree_weight[id], subtree_weight[c]);
    out.per_node[id] = checked_mul(subtree_weight[id], sums[id]);
    out.total = checked_add(out.total, out.per_node[id]);
  }

  // Per-member cost accumulates the ancestor sums top-down.
  std::vector<Cost> above(h.size(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto id = *it;
    const auto& node = h.node(id);
    if (node.is_leaf()) {
      out.per_member[node.member] = above[id];
      continue;
    }
    const auto down = checked_add(above[id], sums[id]);
    for (auto c : node.children) above[c] = down;
  }
  return out;
}

/// Total cost only.
inline Cost hierarchy_cost(const Hierarchy& h, const WeightMap& weights,
                           const MulticastOracle& oracle) {
  return eval_cost_total(h, weights, oracle).total;
}

}  // namespace khier
