#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "khier/common.hpp"
#include "khier/cost.hpp"

namespace khier {

enum class NetworkKind { tree, graph, table };

inline const char* to_string(NetworkKind k) {
  switch (k) {
    case NetworkKind::tree: return "tree";
    case NetworkKind::graph: return "graph";
    case NetworkKind::table: return "table";
  }
  return "?";
}

struct Edge {
  VertexId u;
  VertexId v;
  Cost cost = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// The routing side of an instance: an undirected edge-weighted tree or
/// graph, or an explicit table of multicast costs.
struct RoutingNetwork {
  NetworkKind kind = NetworkKind::graph;
  std::vector<Edge> edges;
  std::map<std::vector<MemberId>, Cost> table;  // keys sorted; table kind only

  friend bool operator==(const RoutingNetwork&, const RoutingNetwork&) = default;
};

/// Adjacency-list view of a routing network with dense vertex indices.
class IndexedGraph {
 public:
  IndexedGraph(const RoutingNetwork& net, const VertexId& controller) {
    index_of(controller);
    for (const auto& e : net.edges) {
      const auto a = index_of(e.u), b = index_of(e.v);
      adj_[a].push_back({b, e.cost});
      adj_[b].push_back({a, e.cost});
    }
  }

  std::size_t size() const { return names_.size(); }
  const VertexId& name(std::size_t i) const { return names_[i]; }
  std::size_t find(const VertexId& v) const {
    auto it = index_.find(v);
    return it == index_.end() ? npos : it->second;
  }
  const std::vector<std::pair<std::size_t, Cost>>& neighbours(std::size_t i) const {
    return adj_[i];
  }

  std::vector<Cost> dijkstra(std::size_t source) const {
    std::vector<Cost> dist(size(), kInfinity);
    using Item = std::pair<Cost, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0;
    pq.push({0, source});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d != dist[u]) continue;
      for (auto [v, c] : adj_[u]) {
        const auto nd = checked_add(d, c);
        if (nd < dist[v]) {
          dist[v] = nd;
          pq.push({nd, v});
        }
      }
    }
    return dist;
  }

 private:
  std::size_t index_of(const VertexId& v) {
    auto [it, inserted] = index_.emplace(v, names_.size());
    if (inserted) {
      names_.push_back(v);
      adj_.emplace_back();
    }
    return it->second;
  }

  std::vector<VertexId> names_;
  std::unordered_map<VertexId, std::size_t> index_;
  std::vector<std::vector<std::pair<std::size_t, Cost>>> adj_;
};

/// Throws ValidationError unless the network is well formed for its kind and
/// every member is a vertex of it (tree and graph kinds).
inline void check_network(const RoutingNetwork& net, const VertexId& controller,
                          std::span<const MemberId> members) {
  if (net.kind == NetworkKind::table) {
    if (!net.edges.empty()) throw ValidationError("table network must not have edges");
    return;
  }
  if (!net.table.empty()) throw ValidationError("multicast table on a non-table network");
  std::set<std::pair<VertexId, VertexId>> seen;
  for (const auto& e : net.edges) {
    if (e.u == e.v) throw ValidationError("self-loop at vertex " + e.u);
    auto key = std::minmax(e.u, e.v);
    if (!seen.emplace(key.first, key.second).second)
      throw ValidationError("duplicate edge " + e.u + " " + e.v);
  }
  IndexedGraph g(net, controller);
  for (const auto& m : members)
    if (g.find(m) == npos) throw ValidationError("member " + m + " is not a vertex of the network");
  const auto dist = g.dijkstra(0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (dist[i] == kInfinity) throw ValidationError("network is disconnected: " + g.name(i) +
                                                    " unreachable from " + controller);
  if (net.kind == NetworkKind::tree && net.edges.size() + 1 != g.size())
    throw ValidationError("tree network contains a cycle");
}

/// Spanning tree over a set of named points, rooted at `root`.
struct SpanningTree {
  std::vector<VertexId> points;
  std::size_t root = 0;
  std::vector<std::size_t> parent;  // npos for the root
  std::vector<Cost> parent_cost;    // cost of the edge to the parent; 0 at the root

  std::size_t size() const { return points.size(); }

  Cost weight() const {
    Cost w = 0;
    for (auto c : parent_cost) w = checked_add(w, c);
    return w;
  }

  /// Children of every point, sorted by point name.
  std::vector<std::vector<std::size_t>> children() const {
    std::vector<std::vector<std::size_t>> ch(size());
    for (std::size_t i = 0; i < size(); ++i)
      if (parent[i] != npos) ch[parent[i]].push_back(i);
    for (auto& c : ch)
      std::sort(c.begin(), c.end(), [&](auto a, auto b) { return points[a] < points[b]; });
    return ch;
  }

  /// Path cost from the root to every point.
  std::vector<Cost> root_distances() const {
    std::vector<Cost> d(size(), kInfinity);
    d[root] = 0;
    std::vector<std::size_t> stack{root};
    const auto ch = children();
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto v : ch[u]) {
        d[v] = checked_add(d[u], parent_cost[v]);
        stack.push_back(v);
      }
    }
    return d;
  }

  /// Undirected edge list (child, parent, cost).
  std::vector<std::tuple<std::size_t, std::size_t, Cost>> edges() const {
    std::vector<std::tuple<std::size_t, std::size_t, Cost>> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (parent[i] != npos) out.emplace_back(i, parent[i], parent_cost[i]);
    return out;
  }
};

/// Roots a tree-kind routing network at the controller.
inline SpanningTree rooted_routing_tree(const RoutingNetwork& net, const VertexId& controller) {
  if (net.kind != NetworkKind::tree) throw InfeasibleError("network is not a tree");
  IndexedGraph g(net, controller);
  SpanningTree t;
  t.points.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) t.points[i] = g.name(i);
  t.root = 0;
  t.parent.assign(g.size(), npos);
  t.parent_cost.assign(g.size(), 0);
  std::vector<char> seen(g.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto [v, c] : g.neighbours(u)) {
      if (seen[v]) {
        if (v != t.parent[u]) throw ValidationError("tree network contains a cycle");
        continue;
      }
      seen[v] = 1;
      t.parent[v] = u;
      t.parent_cost[v] = c;
      stack.push_back(v);
    }
  }
  for (auto s : seen)
    if (!s) throw ValidationError("tree network is disconnected");
  return t;
}

/// Exact multicast cost on a tree: weight of the minimal subtree joining the
/// controller and Y.
class TreeOracle final : public MulticastOracle {
 public:
  TreeOracle(const RoutingNetwork& net, const VertexId& controller)
      : tree_(rooted_routing_tree(net, controller)) {
    for (std::size_t i = 0; i < tree_.size(); ++i) index_.emplace(tree_.points[i], i);
  }

  Cost cost(std::span<const MemberId> subset) const override {
    std::vector<char> marked(tree_.size(), 0);
    marked[tree_.root] = 1;
    Cost total = 0;
    for (const auto& m : subset) {
      auto it = index_.find(m);
      if (it == index_.end()) throw ValidationError("unknown member '" + m + "'");
      for (auto v = it->second; !marked[v]; v = tree_.parent[v]) {
        marked[v] = 1;
        total = checked_add(total, tree_.parent_cost[v]);
      }
    }
    return total;
  }

  const SpanningTree& tree() const { return tree_; }

 private:
  SpanningTree tree_;
  std::unordered_map<VertexId, std::size_t> index_;
};

inline Cost tree_multicast_cost(const RoutingNetwork& net, const VertexId& controller,
                                std::span<const MemberId> subset) {
  return TreeOracle(net, controller).cost(subset);
}

/// Shortest-path distances between a fixed set of points.
struct Metric {
  std::vector<VertexId> points;
  std::vector<Cost> dist;  // row-major, size() x size()

  std::size_t size() const { return points.size(); }
  Cost at(std::size_t i, std::size_t j) const { return dist[i * size() + j]; }

  /// Sub-metric on the given point indices, in that order.
  Metric restrict(std::span<const std::size_t> idx) const {
    Metric m;
    m.points.reserve(idx.size());
    for (auto i : idx) m.points.push_back(points[i]);
    m.dist.resize(idx.size() * idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) m.dist[a * idx.size() + b] = at(idx[a], idx[b]);
    return m;
  }

  std::size_t find(const VertexId& v) const {
    auto it = std::find(points.begin(), points.end(), v);
    return it == points.end() ? npos : static_cast<std::size_t>(it - points.begin());
  }
};

/// Metric closure on {controller} ∪ members. Point 0 is the controller; a
/// member placed at the controller vertex is not duplicated.
inline Metric metric_closure(const RoutingNetwork& net, const VertexId& controller,
                             std::span<const MemberId> members) {
  if (net.kind == NetworkKind::table) throw InfeasibleError("metric closure needs a routing graph");
  IndexedGraph g(net, controller);
  Metric m;
  m.points.push_back(controller);
  for (const auto& x : members)
    if (std::find(m.points.begin(), m.points.end(), x) == m.points.end()) m.points.push_back(x);
  const auto n = m.size();
  m.dist.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = g.find(m.points[i]);
    if (src == npos) throw ValidationError("vertex " + m.points[i] + " is not in the network");
    const auto d = g.dijkstra(src);
    for (std::size_t j = 0; j < n; ++j) {
      const auto dst = g.find(m.points[j]);
      if (dst == npos) throw ValidationError("vertex " + m.points[j] + " is not in the network");
      if (d[dst] == kInfinity) throw ValidationError("network is disconnected");
      m.dist[i * n + j] = d[dst];
    }
  }
  return m;
}

namespace detail {

inline SpanningTree tree_from_edges(const Metric& m, std::size_t root,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  const auto n = m.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  SpanningTree t;
  t.points = m.points;
  t.root = root;
  t.parent.assign(n, npos);
  t.parent_cost.assign(n, 0);
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        t.parent[v] = u;
        t.parent_cost[v] = m.at(u, v);
        stack.push_back(v);
      }
  }
  return t;
}

}  // namespace detail

/// Minimum spanning tree of the complete graph of a metric (Kruskal).
/// Ties break on (cost, smaller point name, larger point name).
inline SpanningTree mst_of_metric(const Metric& m, std::size_t root = 0) {
  const auto n = m.size();
  struct Cand {
    Cost cost;
    const VertexId* lo;
    const VertexId* hi;
    std::size_t a, b;
  };
  std::vector<Cand> cands;
  cands.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const bool a_first = m.points[a] < m.points[b];
      cands.push_back({m.at(a, b), a_first ? &m.points[a] : &m.points[b],
                       a_first ? &m.points[b] : &m.points[a], a, b});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    return std::tie(x.cost, *x.lo, *x.hi) < std::tie(y.cost, *y.lo, *y.hi);
  });
  std::vector<std::size_t> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](std::size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  for (const auto& c : cands) {
    auto ra = find(c.a), rb = find(c.b);
    if (ra == rb) continue;
    uf[ra] = rb;
    chosen.emplace_back(c.a, c.b);
    if (chosen.size() + 1 == n) break;
  }
  return detail::tree_from_edges(m, root, chosen);
}

/// MST weight only (Prim, O(n²)); equals mst_of_metric(m).weight().
inline Cost mst_weight(const Metric& m) {
  const auto n = m.size();
  if (n <= 1) return 0;
  std::vector<Cost> best(n, kInfinity);
  std::vector<char> in(n, 0);
  best[0] = 0;
  Cost total = 0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = npos;
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i] && (u == npos || best[i] < best[u])) u = i;
    in[u] = 1;
    total = checked_add(total, best[u]);
    for (std::size_t v = 0; v < n; ++v)
      if (!in[v] && m.at(u, v) < best[v]) best[v] = m.at(u, v);
  }
  return total;
}

/// M(Y) on a general graph: MST weight of the metric closure on Y ∪ {controller}.
/// The all-pairs closure over every member is computed once at construction.
class GraphOracle final : public MulticastOracle {
 public:
  GraphOracle(const RoutingNetwork& net, const VertexId& controller,
              std::span<const MemberId> members)
      : closure_(metric_closure(net, controller, members)) {}

  explicit GraphOracle(Metric closure) : closure_(std::move(closure)) {}

  Cost cost(std::span<const MemberId> subset) const override {
    if (subset.empty()) return 0;
    return mst_weight(closure_.restrict(indices(subset)));
  }

  /// Point indices (into closure()) for {controller} ∪ subset; controller first.
  std::vector<std::size_t> indices(std::span<const MemberId> subset) const {
    std::vector<std::size_t> idx{0};
    for (const auto& m : subset) {
      const auto i = closure_.find(m);
      if (i == npos) throw ValidationError("unknown member '" + m + "'");
      if (i != 0) idx.push_back(i);
    }
    return idx;
  }

  const Metric& closure() const { return closure_; }

 private:
  Metric closure_;
};

inline Cost graph_multicast_cost(const RoutingNetwork& net, const VertexId& controller,
                                 std::span<const MemberId> subset) {
  if (subset.empty()) return 0;
  return mst_weight(metric_closure(net, controller, subset));
}

/// Explicit multicast-cost table. Queries outside the table fail loudly.
class TableOracle final : public MulticastOracle {
 public:
  explicit TableOracle(std::map<std::vector<MemberId>, Cost> table) : table_(std::move(table)) {}

  Cost cost(std::span<const MemberId> subset) const override {
    if (subset.empty()) return 0;
    auto it = table_.find(std::vector<MemberId>(subset.begin(), subset.end()));
    if (it == table_.end()) {
      std::string names;
      for (const auto& m : subset) names += (names.empty() ? "" : ",") + m;
      throw OracleUndefined("multicast cost undefined for {" + names + "}");
    }
    return it->second;
  }

 private:
  std::map<std::vector<MemberId>, Cost> table_;
};

inline Cost table_multicast_cost(const RoutingNetwork& net, std::span<const MemberId> subset) {
  if (net.kind != NetworkKind::table) throw InfeasibleError("network is not a table");
  return TableOracle(net.table).cost(subset);
}

/// Shallow-light trade-off: alpha = 1 + √2·gamma, beta = 1 + √2/gamma.
struct LastParams {
  Rational gamma{7};

  double alpha() const { return 1.0 + std::sqrt(2.0) * gamma.to_double(); }
  double beta() const { return 1.0 + std::sqrt(2.0) / gamma.to_double(); }
};

namespace detail {

/// a² · x <= b² · y for non-negative integers, exactly.
inline bool squared_le(Cost a, std::uint64_t x, Cost b, std::uint64_t y) {
  constexpr Cost kLimit = Cost{1} << 40;
  if (a >= kLimit || b >= kLimit || x >= kLimit || y >= kLimit)
    throw OverflowError("value too large for exact stretch comparison");
  using U = unsigned __int128;
  return U(a) * U(a) * U(x) <= U(b) * U(b) * U(y);
}

}  // namespace detail

/// d <= (1 + √2·gamma)·D, exactly.
inline bool within_stretch(Cost d, Cost D, Rational gamma) {
  if (d <= D) return true;
  // (d - D) <= √2·(p/q)·D  <=>  (d-D)²·q² <= 2·p²·D²
  const auto p = static_cast<std::uint64_t>(gamma.num), q = static_cast<std::uint64_t>(gamma.den);
  return detail::squared_le(d - D, q * q, D, 2 * p * p);
}

/// w <= (1 + √2/gamma)·mst, exactly.
inline bool within_lightness(Cost w, Cost mst, Rational gamma) {
  if (w <= mst) return true;
  // (w - mst) <= √2·(q/p)·mst  <=>  (w-mst)²·p² <= 2·q²·mst²
  const auto p = static_cast<std::uint64_t>(gamma.num), q = static_cast<std::uint64_t>(gamma.den);
  return detail::squared_le(w - mst, p * p, mst, 2 * q * q);
}

/// Light approximate shortest-path tree of the complete graph of `m`, rooted
/// at `root`.
///
/// Walks the MST depth-first, relaxing along tree edges in both directions.
/// Whenever the current tentative distance of a vertex exceeds
/// alpha·dist(root, v), the direct closure edge (root, v), which is a
/// shortest path in the metric, is grafted and relaxed. Every vertex ends
/// within alpha of its metric distance and the tree weighs at most beta times
/// the MST.
inline SpanningTree build_last(const Metric& m, std::size_t root, const LastParams& params) {
  if (params.gamma.num <= 0) throw ValidationError("gamma must be positive");
  const auto n = m.size();
  const auto mst = mst_of_metric(m, root);
  const auto mst_children = mst.children();

  std::vector<Cost> d(n, kInfinity);
  std::vector<std::size_t> p(n, npos);
  d[root] = 0;

  auto relax = [&](std::size_t u, std::size_t v) {
    if (d[u] == kInfinity) return;
    const auto nd = checked_add(d[u], m.at(u, v));
    if (nd < d[v]) {
      d[v] = nd;
      p[v] = u;
    }
  };

  // Iterative DFS: each frame is (vertex, next child index).
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  auto enter = [&](std::size_t u) {
    if (u != root && (d[u] == kInfinity || !within_stretch(d[u], m.at(root, u), params.gamma)))
      relax(root, u);
    stack.emplace_back(u, 0);
  };
  enter(root);
  while (!stack.empty()) {
    auto& [u, next] = stack.back();
    if (next < mst_children[u].size()) {
      const auto v = mst_children[u][next++];
      relax(u, v);
      enter(v);
    } else {
      const auto done = u;
      stack.pop_back();
      if (!stack.empty()) relax(done, stack.back().first);
    }
  }

  SpanningTree t;
  t.points = m.points;
  t.root = root;
  t.parent = p;
  t.parent_cost.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (p[v] != npos) t.parent_cost[v] = m.at(p[v], v);
  return t;
}

struct LastCheck {
  bool stretch_ok = true;
  bool lightness_ok = true;
  bool ok() const { return stretch_ok && lightness_ok; }
};

/// Verifies both LAST guarantees of `t` against the metric it was built on.
inline LastCheck check_last(const Metric& m, const SpanningTree& t, const LastParams& params) {
  LastCheck c;
  const auto dt = t.root_distances();
  for (std::size_t v = 0; v < t.size(); ++v)
    if (dt[v] == kInfinity || !within_stretch(dt[v], m.at(t.root, v), params.gamma))
      c.stretch_ok = false;
  c.lightness_ok = within_lightness(t.weight(), mst_weight(m), params.gamma);
  return c;
}

}  // namespace khier
