#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond its data types and favour obviousness over
// speed.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "khier/khier.hpp"

namespace oracle {

using khier::Cost;
using khier::Hierarchy;
using khier::MemberId;
using khier::Weight;

// ---------------------------------------------------------------- routing

// Minimal subtree joining root and `subset`: union of root paths, found by
// plain DFS on the edge list.
inline Cost tree_subtree_cost(const std::vector<khier::Edge>& edges, const std::string& root,
                              const std::vector<std::string>& subset) {
  std::map<std::string, std::vector<std::pair<std::string, Cost>>> adj;
  for (const auto& e : edges) {
    adj[e.u].push_back({e.v, e.cost});
    adj[e.v].push_back({e.u, e.cost});
  }
  std::map<std::string, std::pair<std::string, Cost>> up;  // vertex -> (parent, edge cost)
  std::function<void(const std::string&, const std::string&)> dfs = [&](const std::string& v,
                                                                        const std::string& from) {
    for (const auto& [w, c] : adj[v])
      if (w != from) {
        up[w] = {v, c};
        dfs(w, v);
      }
  };
  dfs(root, "");
  std::set<std::string> used;  // child endpoint of every used edge
  for (const auto& m : subset)
    for (auto v = m; v != root; v = up.at(v).first) used.insert(v);
  Cost total = 0;
  for (const auto& v : used) total += up.at(v).second;
  return total;
}

// Floyd–Warshall over all vertices.
inline std::map<std::pair<std::string, std::string>, Cost> all_pairs(
    const std::vector<khier::Edge>& edges, const std::string& root) {
  std::set<std::string> vs{root};
  for (const auto& e : edges) vs.insert(e.u), vs.insert(e.v);
  const Cost inf = std::numeric_limits<Cost>::max() / 4;
  std::map<std::pair<std::string, std::string>, Cost> d;
  for (const auto& a : vs)
    for (const auto& b : vs) d[{a, b}] = a == b ? 0 : inf;
  for (const auto& e : edges) {
    d[{e.u, e.v}] = std::min(d[{e.u, e.v}], e.cost);
    d[{e.v, e.u}] = std::min(d[{e.v, e.u}], e.cost);
  }
  for (const auto& k : vs)
    for (const auto& a : vs)
      for (const auto& b : vs) d[{a, b}] = std::min(d[{a, b}], d[{a, k}] + d[{k, b}]);
  return d;
}

// Prim on the closure restricted to root ∪ subset.
inline Cost mst_of_closure(const std::map<std::pair<std::string, std::string>, Cost>& d,
                           const std::string& root, const std::vector<std::string>& subset) {
  std::vector<std::string> pts{root};
  for (const auto& m : subset)
    if (m != root) pts.push_back(m);
  std::vector<char> in(pts.size(), 0);
  in[0] = 1;
  Cost total = 0;
  for (std::size_t step = 1; step < pts.size(); ++step) {
    Cost best = std::numeric_limits<Cost>::max();
    std::size_t pick = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (in[i])
        for (std::size_t j = 0; j < pts.size(); ++j)
          if (!in[j] && d.at({pts[i], pts[j]}) < best) best = d.at({pts[i], pts[j]}), pick = j;
    in[pick] = 1;
    total += best;
  }
  return total;
}

// Oracle wrapper around an arbitrary function of the subset.
class FnOracle final : public khier::MulticastOracle {
 public:
  explicit FnOracle(std::function<Cost(const std::vector<MemberId>&)> f, bool uniform = false)
      : f_(std::move(f)), uniform_(uniform) {}
  Cost cost(std::span<const MemberId> s) const override {
    return s.empty() ? 0 : f_(std::vector<MemberId>(s.begin(), s.end()));
  }
  bool is_uniform() const override { return uniform_; }

 private:
  std::function<Cost(const std::vector<MemberId>&)> f_;
  bool uniform_;
};

// Deterministic pseudo-random subset cost: hash of the sorted subset.
inline Cost hashed_cost(const std::vector<MemberId>& s, std::uint64_t salt, Cost max) {
  std::uint64_t h = salt ^ 0x9e3779b97f4a7c15ULL;
  for (const auto& m : s)
    for (char c : m) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  return h % max + 1;
}

// ------------------------------------------------------------ hierarchies

struct Tree {
  MemberId member;  // leaves only
  std::vector<Tree> kids;
};

inline Tree to_tree(const Hierarchy& h, khier::NodeId id) {
  Tree t{h.node(id).member, {}};
  for (auto c : h.node(id).children) t.kids.push_back(to_tree(h, c));
  return t;
}
inline Tree to_tree(const Hierarchy& h) { return to_tree(h, h.root()); }

inline void leaves(const Tree& t, std::vector<MemberId>& out) {
  if (t.kids.empty()) out.push_back(t.member);
  for (const auto& k : t.kids) leaves(k, out);
}
inline std::vector<MemberId> sorted_leaves(const Tree& t) {
  std::vector<MemberId> out;
  leaves(t, out);
  std::sort(out.begin(), out.end());
  return out;
}

// Per-member cost straight from the definition: walk the root path of x.
inline bool member_cost_rec(const Tree& t, const MemberId& x, const khier::MulticastOracle& m, Cost& acc) {
  if (t.kids.empty()) return t.member == x;
  for (const auto& k : t.kids)
    if (member_cost_rec(k, x, m, acc)) {
      for (const auto& c : t.kids) {
        const auto s = sorted_leaves(c);
        acc += m.cost(s);
      }
      return true;
    }
  return false;
}
inline Cost member_cost(const Hierarchy& h, const MemberId& x, const khier::MulticastOracle& m) {
  Cost acc = 0;
  member_cost_rec(to_tree(h), x, m, acc);
  return acc;
}

// Σ_x w_x · member_cost(x).
inline Cost weighted_sum_cost(const Hierarchy& h, const khier::WeightMap& w,
                              const khier::MulticastOracle& m) {
  Cost total = 0;
  for (const auto& x : sorted_leaves(to_tree(h))) total += w.at(x) * member_cost(h, x, m);
  return total;
}

inline Hierarchy from_tree(const Tree& t) {
  if (t.kids.empty()) return Hierarchy::leaf(t.member);
  std::vector<Hierarchy> parts;
  for (const auto& k : t.kids) parts.push_back(from_tree(k));
  return khier::combine(parts);
}

// Every rooted tree with leaf set `s` and internal degree >= 2, each one
// exactly once (children listed in canonical block order).
inline void all_trees(const std::vector<MemberId>& s, std::vector<Tree>& out);

inline void set_partitions(const std::vector<MemberId>& s, std::size_t i,
                           std::vector<std::vector<MemberId>>& blocks,
                           std::vector<std::vector<std::vector<MemberId>>>& out) {
  if (i == s.size()) {
    out.push_back(blocks);
    return;
  }
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    blocks[k].push_back(s[i]);
    set_partitions(s, i + 1, blocks, out);
    blocks[k].pop_back();
  }
  blocks.push_back({s[i]});
  set_partitions(s, i + 1, blocks, out);
  blocks.pop_back();
}

inline void all_trees(const std::vector<MemberId>& s, std::vector<Tree>& out) {
  if (s.size() == 1) {
    out.push_back({s[0], {}});
    return;
  }
  std::vector<std::vector<std::vector<MemberId>>> parts;
  std::vector<std::vector<MemberId>> blocks;
  set_partitions(s, 0, blocks, parts);
  for (const auto& p : parts) {
    if (p.size() < 2) continue;
    std::vector<std::vector<Tree>> options;
    for (const auto& b : p) {
      options.emplace_back();
      all_trees(b, options.back());
    }
    // Cartesian product.
    std::vector<std::size_t> pick(options.size(), 0);
    for (;;) {
      Tree t;
      for (std::size_t k = 0; k < options.size(); ++k) t.kids.push_back(options[k][pick[k]]);
      out.push_back(std::move(t));
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == options[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
  }
}

// Exhaustive optimum by evaluating every tree by per-member sums.
inline Cost exhaustive_opt(const std::vector<MemberId>& s, const khier::WeightMap& w,
                           const khier::MulticastOracle& m) {
  std::vector<Tree> trees;
  all_trees(s, trees);
  Cost best = std::numeric_limits<Cost>::max();
  for (const auto& t : trees) best = std::min(best, weighted_sum_cost(from_tree(t), w, m));
  return best;
}

// Random hierarchy over `members`: shuffle, then repeatedly wrap a run of
// 2..4 adjacent pieces in a new node. With `allow_unary`, a piece is
// sometimes wrapped alone, giving a degree-1 node.
inline Hierarchy random_hierarchy(std::vector<MemberId> members, std::mt19937_64& rng,
                                  bool allow_unary = false) {
  std::shuffle(members.begin(), members.end(), rng);
  std::vector<Hierarchy> pool;
  for (const auto& m : members) pool.push_back(Hierarchy::leaf(m));
  while (pool.size() > 1) {
    const auto i = rng() % pool.size();
    if (allow_unary && rng() % 8 == 0) {
      pool[i] = khier::combine({pool[i]});
      continue;
    }
    const auto room = pool.size() - i;
    if (room < 2) continue;
    const auto k = std::min<std::size_t>(2 + rng() % 3, room);
    std::vector<Hierarchy> grp(pool.begin() + static_cast<std::ptrdiff_t>(i),
                               pool.begin() + static_cast<std::ptrdiff_t>(i + k));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i),
               pool.begin() + static_cast<std::ptrdiff_t>(i + k));
    pool.insert(pool.begin() + static_cast<std::ptrdiff_t>(i), khier::combine(grp));
  }
  return std::move(pool.front());
}

inline khier::WeightMap random_weights(const std::vector<MemberId>& members, std::mt19937_64& rng,
                                       Weight max) {
  khier::WeightMap w;
  for (const auto& m : members) w[m] = 1 + rng() % max;
  return w;
}

inline bool is_binary(const Hierarchy& h) {
  for (const auto& n : h.nodes())
    if (!n.is_leaf() && n.children.size() != 2) return false;
  return true;
}

}  // namespace oracle
