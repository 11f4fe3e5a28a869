#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "khier/approx_uniform.hpp"
#include "khier/cost.hpp"
#include "khier/hierarchy.hpp"
#include "khier/multicast.hpp"

namespace khier {

struct PartitionResult {
  std::vector<MemberId> x;  // sorted
  VertexId vertex;          // partition vertex (the heavy member's vertex when unbalanced)
  Cost delta = 0;           // routing cost from the controller to `vertex`
  bool balanced = false;    // W(S)/3 <= W(X) <= 2W(S)/3
};

/// Splits the members located on a rooted tree.
///
/// Starting at the root, descend into any child subtree heavier than 2W/3.
/// At the first vertex without such a child, add child subtrees in
/// decreasing weight (ties by id) until they reach W/3; those members form X.
/// If the heavy child is a single member, X is that member alone. A member
/// sitting on a vertex that also has weighted children counts as a zero-cost
/// leaf hanging off that vertex.
inline PartitionResult partition_tree(const SpanningTree& tree, std::span<const MemberId> members,
                                      const WeightMap& weights) {
  if (members.empty()) throw ValidationError("partition: empty member set");
  const auto n = tree.size();
  std::unordered_map<VertexId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(tree.points[i], i);

  std::vector<Weight> own(n, 0);
  std::vector<char> is_member(n, 0);
  Weight total = 0;
  for (const auto& m : members) {
    auto it = index.find(m);
    if (it == index.end()) throw ValidationError("member " + m + " is not on the tree");
    auto wt = weights.find(m);
    if (wt == weights.end()) throw ValidationError("unknown member '" + m + "'");
    own[it->second] = wt->second;
    is_member[it->second] = 1;
    total = checked_add(total, wt->second);
  }
  if (total == 0) throw ValidationError("partition: total weight is zero");

  const auto children = tree.children();
  // Subtree weights, children before parents.
  std::vector<Weight> sub(n, 0);
  std::vector<std::size_t> order{tree.root};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto c : children[order[i]]) order.push_back(c);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    sub[*it] = own[*it];
    for (auto c : children[*it]) sub[*it] = checked_add(sub[*it], sub[c]);
  }
  const auto dist = tree.root_distances();

  auto collect = [&](std::size_t v, std::vector<MemberId>& out) {
    std::vector<std::size_t> stack{v};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      if (is_member[u]) out.push_back(tree.points[u]);
      for (auto c : children[u]) stack.push_back(c);
    }
  };
  auto heavy = [&](Weight w) {
    return static_cast<unsigned __int128>(w) * 3 > static_cast<unsigned __int128>(total) * 2;
  };

  struct Candidate {
    Weight weight;
    VertexId id;
    std::size_t vertex;
    bool virtual_leaf;  // the member sitting on the current vertex itself
  };

  std::size_t v = tree.root;
  for (;;) {
    std::vector<Candidate> cands;
    for (auto c : children[v])
      if (sub[c] > 0) cands.push_back({sub[c], tree.points[c], c, false});
    if (own[v] > 0) cands.push_back({own[v], tree.points[v], v, true});

    const Candidate* big = nullptr;
    for (const auto& c : cands)
      if (heavy(c.weight)) big = &c;

    if (big) {
      const bool single_member = big->virtual_leaf || sub[big->vertex] == own[big->vertex];
      if (single_member) {
        PartitionResult r;
        r.x = {tree.points[big->vertex]};
        r.vertex = tree.points[big->vertex];
        r.delta = dist[big->vertex];
        r.balanced = false;
        return r;
      }
      v = big->vertex;
      continue;
    }

    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.weight != b.weight ? a.weight > b.weight : a.id < b.id;
    });
    PartitionResult r;
    Weight acc = 0;
    for (const auto& c : cands) {
      acc += c.weight;
      if (c.virtual_leaf)
        r.x.push_back(tree.points[v]);
      else
        collect(c.vertex, r.x);
      if (static_cast<unsigned __int128>(acc) * 3 >= total) break;
    }
    std::sort(r.x.begin(), r.x.end());
    r.vertex = tree.points[v];
    r.delta = dist[v];
    const auto a3 = static_cast<unsigned __int128>(acc) * 3;
    r.balanced = a3 >= total && a3 <= static_cast<unsigned __int128>(total) * 2;
    return r;
  }
}

/// Convenience overload for a tree-kind routing network.
inline PartitionResult partition_tree(const RoutingNetwork& net, const VertexId& controller,
                                      std::span<const MemberId> members, const WeightMap& weights) {
  return partition_tree(rooted_routing_tree(net, controller), members, weights);
}

/// One recursion level of the routed algorithms.
struct RecursionStep {
  std::vector<MemberId> members;  // S' at this level, sorted
  PartitionResult partition;
  Cost multicast = 0;             // M(S')
  bool used_ptas = false;         // X was handed to the PTAS
  // Graph variant only: the closure metric and the LAST built on it.
  Metric metric;
  SpanningTree last;
};

struct RoutedTrace {
  std::vector<RecursionStep> steps;
};

struct RoutedParams {
  Rational epsilon{1, 2};
  LastParams last{};
  std::size_t heavy_set_cap = kDefaultBruteForceCap;
};

namespace detail {

inline std::vector<MemberId> set_minus(const std::vector<MemberId>& s, const std::vector<MemberId>& x) {
  std::vector<MemberId> out;
  std::set_difference(s.begin(), s.end(), x.begin(), x.end(), std::back_inserter(out));
  return out;
}

inline PtasParams ptas_params_for(const RoutedParams& p) {
  PtasParams q;
  q.epsilon = p.epsilon;
  q.heavy_set_cap = p.heavy_set_cap;
  q.brute_force_cap = std::max(p.heavy_set_cap, kDefaultBruteForceCap);
  return q;
}

// Shared divide-and-conquer skeleton; `split` returns the partition and M(S').
template <class Split>
Hierarchy routed_recurse(std::vector<MemberId> s, const WeightMap& weights, const RoutedParams& params,
                         Split& split, RoutedTrace* trace) {
  if (s.size() == 1) return Hierarchy::leaf(s.front());
  RecursionStep step;
  step.members = s;
  split(s, step);
  const auto& part = step.partition;
  auto y = set_minus(s, part.x);
  if (y.empty() || part.x.empty()) throw Error("partition produced an empty side");

  Hierarchy t1;
  if (!part.balanced) {
    t1 = Hierarchy::leaf(part.x.front());
  } else if (checked_mul(5, part.delta) <= step.multicast) {
    t1 = Hierarchy();  // filled below, after recording the step
  } else {
    step.used_ptas = true;
    t1 = ptas_structure(part.x, weights, ptas_params_for(params)).hierarchy;
  }
  const bool recurse_x = part.balanced && !step.used_ptas;
  auto x = part.x;
  if (trace) trace->steps.push_back(std::move(step));
  if (recurse_x) t1 = routed_recurse(std::move(x), weights, params, split, trace);
  auto t2 = routed_recurse(std::move(y), weights, params, split, trace);
  return combine({std::move(t1), std::move(t2)});
}

inline std::vector<MemberId> sorted_members(std::span<const MemberId> members) {
  std::vector<MemberId> s(members.begin(), members.end());
  std::sort(s.begin(), s.end());
  if (s.empty()) throw ValidationError("empty member set");
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw ValidationError("duplicate member");
  return s;
}

}  // namespace detail

/// Divide and conquer on a routing tree. At each level the partition vertex v
/// decides how X is handled: recursively when 5·Δ <= M(S'), by the PTAS
/// otherwise; the rest Y always recurses. The two halves are combined under
/// a new root.
inline Hierarchy approx_tree(const RoutingNetwork& net, const VertexId& controller,
                             std::span<const MemberId> members, const WeightMap& weights,
                             const RoutedParams& params = {}, RoutedTrace* trace = nullptr) {
  if (net.kind != NetworkKind::tree) throw InfeasibleError("approx_tree requires a tree network");
  const auto tree = rooted_routing_tree(net, controller);
  const TreeOracle oracle(net, controller);
  auto split = [&](const std::vector<MemberId>& s, RecursionStep& step) {
    step.partition = partition_tree(tree, s, weights);
    step.multicast = oracle.cost(s);
  };
  return detail::routed_recurse(detail::sorted_members(members), weights, params, split, trace);
}

/// Divide and conquer on a general graph. Each level works on the metric
/// closure of S' ∪ {controller}: its MST gives M(S'), a LAST of the closure
/// is partitioned like a routing tree, and Δ is the LAST path cost to the
/// partition vertex.
inline Hierarchy approx_graph(const RoutingNetwork& net, const VertexId& controller,
                              std::span<const MemberId> members, const WeightMap& weights,
                              const RoutedParams& params = {}, RoutedTrace* trace = nullptr) {
  if (net.kind != NetworkKind::graph) throw InfeasibleError("approx_graph requires a graph network");
  const auto sorted = detail::sorted_members(members);
  const GraphOracle oracle(net, controller, sorted);
  auto split = [&](const std::vector<MemberId>& s, RecursionStep& step) {
    auto metric = oracle.closure().restrict(oracle.indices(s));
    const auto last = build_last(metric, 0, params.last);
    step.partition = partition_tree(last, s, weights);
    step.multicast = mst_weight(metric);
    if (trace) {
      step.metric = std::move(metric);
      step.last = last;
    }
  };
  return detail::routed_recurse(sorted, weights, params, split, trace);
}

/// Rewrites every node of degree > 2 into binary form, bottom-up.
///
/// Children of a node u are split by weight. If no child exceeds 2/3 of
/// W(T_u), the children are dealt in decreasing weight (ties by position)
/// into two groups, each child joining the currently lighter group; both
/// groups end with at least W(T_u)/3. Otherwise the heavy child is paired
/// with a new node holding the remaining children. Groups of more than two
/// children are split again the same way. Leaves and their order are kept.
inline Hierarchy binarize(const Hierarchy& h, const WeightMap& weights) {
  const auto order = detail::checked_postorder(h);
  std::vector<Weight> sub(h.size(), 0);
  for (auto id : order) {
    const auto& node = h.node(id);
    if (node.is_leaf()) {
      auto it = weights.find(node.member);
      if (it == weights.end()) throw ValidationError("unknown member '" + node.member + "'");
      sub[id] = it->second;
    }
    for (auto c : node.children) sub[id] = checked_add(sub[id], sub[c]);
  }

  std::vector<HierarchyNode> out;
  std::vector<NodeId> mapped(h.size(), npos);
  std::vector<Weight> out_w;

  auto emit = [&](HierarchyNode node, Weight w) {
    out.push_back(std::move(node));
    out_w.push_back(w);
    return out.size() - 1;
  };
  auto group = [&](auto& self, std::vector<NodeId> kids) -> NodeId {
    if (kids.size() == 1) return kids.front();
    if (kids.size() == 2) return emit({{}, kids}, out_w[kids[0]] + out_w[kids[1]]);
    Weight total = 0;
    for (auto k : kids) total += out_w[k];
    std::size_t heavy = npos;
    for (std::size_t i = 0; i < kids.size(); ++i)
      if (static_cast<unsigned __int128>(out_w[kids[i]]) * 3 >
          static_cast<unsigned __int128>(total) * 2)
        heavy = i;
    std::vector<NodeId> a, b;
    if (heavy != npos) {
      a.push_back(kids[heavy]);
      for (std::size_t i = 0; i < kids.size(); ++i)
        if (i != heavy) b.push_back(kids[i]);
    } else {
      std::vector<std::size_t> idx(kids.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::stable_sort(idx.begin(), idx.end(),
                       [&](auto x, auto y) { return out_w[kids[x]] > out_w[kids[y]]; });
      Weight wa = 0, wb = 0;
      std::vector<char> in_a(kids.size(), 0);
      for (auto i : idx) {
        if (wa <= wb) {
          in_a[i] = 1;
          wa += out_w[kids[i]];
        } else {
          wb += out_w[kids[i]];
        }
      }
      // Keep the original relative order inside each group.
      for (std::size_t i = 0; i < kids.size(); ++i) (in_a[i] ? a : b).push_back(kids[i]);
    }
    const auto left = self(self, std::move(a));
    const auto right = self(self, std::move(b));
    return emit({{}, {left, right}}, total);
  };

  for (auto id : order) {
    const auto& node = h.node(id);
    if (node.is_leaf()) {
      mapped[id] = emit(node, sub[id]);
      continue;
    }
    std::vector<NodeId> kids;
    for (auto c : node.children) kids.push_back(mapped[c]);
    if (kids.size() <= 2)
      mapped[id] = emit({{}, std::move(kids)}, sub[id]);
    else
      mapped[id] = group(group, std::move(kids));
  }
  return Hierarchy::from_nodes(std::move(out), mapped[h.root()]);
}

}  // namespace khier
