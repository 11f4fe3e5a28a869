#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "khier/cost.hpp"
#include "khier/exact.hpp"
#include "khier/hierarchy.hpp"

namespace khier {

/// A sub-hierarchy waiting to be merged, keyed by weight then by the
/// smallest member id it contains.
template <class W>
struct WeightedTree {
  Hierarchy tree;
  W weight{};
  MemberId id;
};

namespace detail {

/// Repeatedly combines three equal-weight trees, scanning from the lightest
/// class and taking the three smallest ids. `less` orders weights, `equal`
/// tests weight identity and `triple` gives the weight of a merged triple.
template <class W, class Less, class Equal, class Triple>
std::vector<WeightedTree<W>> triple_merge(std::vector<WeightedTree<W>> pool, Less less,
                                          Equal equal, Triple triple) {
  auto order = [&](const WeightedTree<W>& a, const WeightedTree<W>& b) {
    if (less(a.weight, b.weight)) return true;
    if (less(b.weight, a.weight)) return false;
    return a.id < b.id;
  };
  for (;;) {
    std::sort(pool.begin(), pool.end(), order);
    std::size_t i = 0;
    bool merged = false;
    while (i + 2 < pool.size()) {
      if (equal(pool[i].weight, pool[i + 2].weight)) {
        WeightedTree<W> t{combine({pool[i].tree, pool[i + 1].tree, pool[i + 2].tree}),
                          triple(pool[i].weight), pool[i].id};
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i),
                   pool.begin() + static_cast<std::ptrdiff_t>(i + 3));
        pool.push_back(std::move(t));
        merged = true;
        break;
      }
      ++i;
    }
    if (!merged) return pool;
  }
}

/// Huffman: combine the two lightest (ties by id) until one tree remains.
template <class W, class Less, class Plus>
Hierarchy huffman_merge(std::vector<WeightedTree<W>> pool, Less less, Plus plus) {
  if (pool.empty()) throw ValidationError("huffman: empty pool");
  auto heavier = [&](const WeightedTree<W>& a, const WeightedTree<W>& b) {
    if (less(b.weight, a.weight)) return true;
    if (less(a.weight, b.weight)) return false;
    return a.id > b.id;
  };
  // Min-heap on (weight, id).
  std::make_heap(pool.begin(), pool.end(), heavier);
  while (pool.size() > 1) {
    std::pop_heap(pool.begin(), pool.end(), heavier);
    auto a = std::move(pool.back());
    pool.pop_back();
    std::pop_heap(pool.begin(), pool.end(), heavier);
    auto b = std::move(pool.back());
    pool.pop_back();
    pool.push_back({combine({a.tree, b.tree}), plus(a.weight, b.weight), std::min(a.id, b.id)});
    std::push_heap(pool.begin(), pool.end(), heavier);
  }
  return std::move(pool.front().tree);
}

}  // namespace detail

/// Triple-merge pass over integer-weighted trees. The result is sorted by
/// (weight, id).
inline std::vector<WeightedTree<Weight>> triple_merge_pass(std::vector<WeightedTree<Weight>> pool) {
  return detail::triple_merge(
      std::move(pool), std::less<Weight>{}, std::equal_to<Weight>{},
      [](Weight w) { return checked_mul(w, 3); });
}

inline std::vector<WeightedTree<Weight>> singleton_pool(std::span<const MemberId> members,
                                                        const WeightMap& weights) {
  std::vector<WeightedTree<Weight>> pool;
  for (const auto& m : members) {
    auto it = weights.find(m);
    if (it == weights.end()) throw ValidationError("unknown member '" + m + "'");
    pool.push_back({Hierarchy::leaf(m), it->second, m});
  }
  return pool;
}

/// Binary hierarchy by the classic two-lightest merge on the exact weights.
inline Hierarchy huffman_binary_build(std::span<const MemberId> members, const WeightMap& weights) {
  if (members.empty()) throw ValidationError("huffman: empty member set");
  for (const auto& m : members)
    if (auto it = weights.find(m); it != weights.end() && it->second == 0)
      throw ValidationError("huffman: member " + m + " has zero weight");
  return detail::huffman_merge(singleton_pool(members, weights), std::less<Weight>{},
                               [](Weight a, Weight b) { return checked_add(a, b); });
}

struct PtasParams {
  Rational epsilon{1};
  std::size_t heavy_set_cap = kDefaultBruteForceCap;
  /// H is solved exactly; a heavy set larger than this is refused.
  std::size_t brute_force_cap = kDefaultBruteForceCap;
};

/// Weight rounded up to 3^triples · (1+eps)^exponent. Two keys have the same
/// value only if they are identical, so equality is exact.
struct RoundedWeight {
  std::int64_t exponent = 0;
  std::int64_t triples = 0;
  friend bool operator==(const RoundedWeight&, const RoundedWeight&) = default;
};

/// Smallest k >= 0 with (1+eps)^k >= w.
inline std::int64_t rounding_exponent(Weight w, Rational eps) {
  if (w <= 1) return 0;
  const long double base = std::log1p(eps.to_long_double());
  const long double lw = std::log(static_cast<long double>(w));
  auto k = static_cast<std::int64_t>(std::ceil(lw / base - 1e-12L));
  return std::max<std::int64_t>(k, 0);
}

struct PtasOutcome {
  Hierarchy hierarchy;
  std::size_t heavy_count = 0;
  bool cap_binding = false;    // the configured cap, not 3^ceil(1/eps^2), sized H
  bool fallback_used = false;  // no node met both attach constraints
  std::optional<NodeId> attach_node;  // node of T* that received T_L
};

namespace detail {

inline std::size_t heavy_set_size(Rational eps, std::size_t cap, std::size_t n, bool& cap_binding) {
  // 3^ceil(1/eps²), saturating.
  const auto num2 = static_cast<unsigned __int128>(eps.num) * eps.num;
  const auto den2 = static_cast<unsigned __int128>(eps.den) * eps.den;
  const auto exponent = (den2 + num2 - 1) / num2;
  std::size_t theoretical = 1;
  for (unsigned __int128 i = 0; i < exponent && theoretical <= n; ++i) theoretical *= 3;
  cap_binding = cap < theoretical && cap < n;
  return std::min({theoretical, cap, n});
}

}  // namespace detail

/// Hierarchy structure for uniform multicast cost, built from weights alone.
///
/// The heaviest min(3^ceil(1/eps²), cap, |S|) members (ties by id) form H and
/// are solved exactly. The rest, L, are rounded up to powers of (1+eps),
/// merged in equal-weight triples, then Huffman-merged into T_L. T_L is hung
/// under the lightest node of the optimum for H that weighs at most eps·W(S)
/// and sits at depth at most ceil(1/eps); a leaf host gets a splice node.
inline PtasOutcome ptas_structure(std::span<const MemberId> members_in, const WeightMap& weights,
                                  const PtasParams& params) {
  const auto eps = params.epsilon;
  if (eps.num <= 0 || Rational(1) < eps) throw ValidationError("epsilon must lie in (0, 1]");
  if (params.heavy_set_cap < 1) throw ValidationError("heavy set cap must be at least 1");
  if (members_in.empty()) throw ValidationError("ptas: empty member set");

  std::vector<std::pair<Weight, MemberId>> ranked;
  Weight total = 0;
  for (const auto& m : members_in) {
    auto it = weights.find(m);
    if (it == weights.end()) throw ValidationError("unknown member '" + m + "'");
    if (it->second == 0) throw ValidationError("ptas: member " + m + " has zero weight");
    ranked.emplace_back(it->second, m);
    total = checked_add(total, it->second);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  PtasOutcome out;
  out.heavy_count =
      detail::heavy_set_size(eps, params.heavy_set_cap, ranked.size(), out.cap_binding);
  if (out.heavy_count > params.brute_force_cap)
    throw InfeasibleError("heavy set of " + std::to_string(out.heavy_count) +
                          " members exceeds the brute-force cap");

  std::vector<MemberId> heavy, light;
  for (std::size_t i = 0; i < ranked.size(); ++i)
    (i < out.heavy_count ? heavy : light).push_back(ranked[i].second);

  const UniformOracle unit;
  BruteForceConfig cfg;
  cfg.max_members = params.brute_force_cap;
  auto t_star = brute_force_opt(heavy, weights, unit, cfg).hierarchy;
  if (light.empty()) {
    out.hierarchy = std::move(t_star);
    return out;
  }

  // Rounded pool for L.
  std::vector<WeightedTree<RoundedWeight>> pool;
  for (const auto& m : light)
    pool.push_back({Hierarchy::leaf(m), {rounding_exponent(weights.at(m), eps), 0}, m});
  const long double log_base = std::log1p(eps.to_long_double());
  const long double log3 = std::log(3.0L);
  auto log_value = [&](const RoundedWeight& r) {
    return static_cast<long double>(r.exponent) * log_base + static_cast<long double>(r.triples) * log3;
  };
  pool = detail::triple_merge(
      std::move(pool),
      [&](const RoundedWeight& a, const RoundedWeight& b) {
        return !(a == b) && log_value(a) < log_value(b);
      },
      std::equal_to<RoundedWeight>{},
      [](RoundedWeight r) { return RoundedWeight{r.exponent, r.triples + 1}; });

  std::vector<WeightedTree<long double>> real_pool;
  for (auto& t : pool) real_pool.push_back({std::move(t.tree), std::exp(log_value(t.weight)), t.id});
  const auto t_light = detail::huffman_merge(std::move(real_pool), std::less<long double>{},
                                             std::plus<long double>{});

  // Attach point: weight <= eps·W(S) (exactly: den·w <= num·W), depth <= ceil(1/eps).
  const auto depth_cap = static_cast<std::size_t>((eps.den + eps.num - 1) / eps.num);
  const auto order = detail::checked_postorder(t_star);
  std::vector<Weight> sub_w(t_star.size(), 0);
  std::vector<MemberId> min_id(t_star.size());
  for (auto id : order) {
    const auto& node = t_star.node(id);
    if (node.is_leaf()) {
      sub_w[id] = weights.at(node.member);
      min_id[id] = node.member;
      continue;
    }
    min_id[id] = min_id[node.children.front()];
    for (auto c : node.children) {
      sub_w[id] += sub_w[c];
      min_id[id] = std::min(min_id[id], min_id[c]);
    }
  }
  std::optional<std::tuple<Weight, std::size_t, MemberId, NodeId>> chosen;
  for (auto [id, depth] : preorder_with_depth(t_star)) {
    if (depth > depth_cap) continue;
    const auto lhs = static_cast<unsigned __int128>(sub_w[id]) * static_cast<std::uint64_t>(eps.den);
    const auto rhs = static_cast<unsigned __int128>(total) * static_cast<std::uint64_t>(eps.num);
    if (lhs > rhs) continue;
    std::tuple<Weight, std::size_t, MemberId, NodeId> cand{sub_w[id], depth, min_id[id], id};
    if (!chosen || cand < *chosen) chosen = cand;
  }
  // Fallback: hang T_L under the root of T*.
  out.fallback_used = !chosen.has_value();
  const NodeId host = chosen ? std::get<3>(*chosen) : t_star.root();
  out.attach_node = host;
  out.hierarchy = attach_at(t_star, host, t_light);
  return out;
}

/// PTAS for uniform multicast cost. Refuses any other oracle.
inline Hierarchy ptas_build(std::span<const MemberId> members, const WeightMap& weights,
                            const MulticastOracle& oracle, const PtasParams& params = {}) {
  if (!oracle.is_uniform()) throw InfeasibleError("ptas_build requires a uniform multicast oracle");
  return ptas_structure(members, weights, params).hierarchy;
}

}  // namespace khier
