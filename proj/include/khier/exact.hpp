#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "khier/cost.hpp"
#include "khier/hierarchy.hpp"

namespace khier {

inline constexpr std::size_t kDefaultBruteForceCap = 9;

struct BruteForceConfig {
  std::size_t max_members = kDefaultBruteForceCap;
  /// When set, internal nodes have degree 2 or 3 only. Refused for
  /// non-uniform oracles.
  bool restrict_degree_2_3 = false;
};

struct ExactSolution {
  Hierarchy hierarchy;
  Cost cost = 0;
};

/// Minimum-cost hierarchy by exhaustive search.
///
/// Every rooted tree with leaf set S and internal degree >= 2 is covered by a
/// memoised recursion over subsets: the optimum for a subset is the best set
/// partition of it into at least two blocks, each block solved optimally and
/// charged W(subset)·M(block). Ties keep the first partition in enumeration
/// order, which makes the result deterministic.
inline ExactSolution brute_force_opt(std::span<const MemberId> members_in, const WeightMap& weights,
                                     const MulticastOracle& oracle,
                                     const BruteForceConfig& cfg = {}) {
  if (cfg.max_members < 1) throw ValidationError("brute force cap must be at least 1");
  if (members_in.empty()) throw ValidationError("brute force: empty member set");
  if (members_in.size() > cfg.max_members)
    throw InfeasibleError("brute force: " + std::to_string(members_in.size()) +
                          " members exceeds the cap of " + std::to_string(cfg.max_members));
  if (members_in.size() > 24) throw InfeasibleError("brute force: more than 24 members");
  if (cfg.restrict_degree_2_3 && !oracle.is_uniform())
    throw InfeasibleError("degree restriction {2,3} is only valid for uniform multicast cost");

  std::vector<MemberId> members(members_in.begin(), members_in.end());
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end())
    throw ValidationError("brute force: duplicate member");
  const auto n = members.size();
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;

  std::vector<Weight> w(full + 1, 0);
  std::vector<Cost> mc(full + 1, 0);
  std::vector<MemberId> scratch;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const auto low = static_cast<unsigned>(__builtin_ctz(mask));
    auto it = weights.find(members[low]);
    if (it == weights.end()) throw ValidationError("unknown member '" + members[low] + "'");
    w[mask] = checked_add(w[mask & (mask - 1)], it->second);
    scratch.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) scratch.push_back(members[i]);
    mc[mask] = oracle.cost(scratch);
  }

  std::vector<Cost> opt(full + 1, 0);
  std::vector<std::vector<std::uint32_t>> blocks(full + 1);

  // Per-mask partition tables, indexed by submask; reused across masks.
  // best[k][sub]: cheapest split of sub into exactly k+1 blocks (restricted
  // mode) or into any number of blocks (k = 0 only, unrestricted mode).
  const int layers = cfg.restrict_degree_2_3 ? 3 : 1;
  std::vector<std::vector<Cost>> best(layers, std::vector<Cost>(full + 1, kInfinity));
  std::vector<std::vector<std::uint32_t>> pick(layers, std::vector<std::uint32_t>(full + 1, 0));

  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;  // singleton: a bare leaf
    const auto W = w[mask];
    auto val = [&](std::uint32_t b) { return checked_add(opt[b], checked_mul(W, mc[b])); };

    // Submasks in increasing order so that sub \ B is always ready.
    std::vector<std::uint32_t> subs;
    for (std::uint32_t sub = mask; sub; sub = (sub - 1) & mask) subs.push_back(sub);
    std::reverse(subs.begin(), subs.end());

    for (auto sub : subs) {
      const std::uint32_t low = sub & (~sub + 1);
      const std::uint32_t rest = sub ^ low;
      if (!cfg.restrict_degree_2_3) {
        Cost b_cost = kInfinity;
        std::uint32_t b_pick = 0;
        // Block B holds the lowest member of sub; larger blocks first.
        for (std::uint32_t r = rest;; r = (r - 1) & rest) {
          const std::uint32_t B = low | r;
          if (!(sub == mask && B == mask)) {
            const std::uint32_t left = sub ^ B;
            const Cost tail = left ? best[0][left] : 0;
            if (tail != kInfinity) {
              const Cost c = checked_add(val(B), tail);
              if (c < b_cost) {
                b_cost = c;
                b_pick = B;
              }
            }
          }
          if (r == 0) break;
        }
        best[0][sub] = b_cost;
        pick[0][sub] = b_pick;
      } else {
        best[0][sub] = val(sub);
        pick[0][sub] = sub;
        for (int k = 1; k < 3; ++k) {
          Cost b_cost = kInfinity;
          std::uint32_t b_pick = 0;
          for (std::uint32_t r = rest;; r = (r - 1) & rest) {
            const std::uint32_t B = low | r;
            const std::uint32_t left = sub ^ B;
            if (left && best[k - 1][left] != kInfinity) {
              const Cost c = checked_add(val(B), best[k - 1][left]);
              if (c < b_cost) {
                b_cost = c;
                b_pick = B;
              }
            }
            if (r == 0) break;
          }
          best[k][sub] = b_cost;
          pick[k][sub] = b_pick;
        }
      }
    }

    auto& out = blocks[mask];
    if (!cfg.restrict_degree_2_3) {
      opt[mask] = best[0][mask];
      for (std::uint32_t sub = mask; sub; sub ^= pick[0][sub]) out.push_back(pick[0][sub]);
    } else {
      int k = best[1][mask] <= best[2][mask] ? 1 : 2;
      opt[mask] = best[k][mask];
      for (std::uint32_t sub = mask; sub; --k) {
        out.push_back(pick[k][sub]);
        sub ^= pick[k][sub];
      }
    }
  }

  // Rebuild the hierarchy from the recorded block choices.
  std::vector<HierarchyNode> nodes;
  auto build = [&](auto& self, std::uint32_t mask) -> NodeId {
    if ((mask & (mask - 1)) == 0) {
      nodes.push_back({members[static_cast<unsigned>(__builtin_ctz(mask))], {}});
      return nodes.size() - 1;
    }
    std::vector<NodeId> ch;
    for (auto b : blocks[mask]) ch.push_back(self(self, b));
    nodes.push_back({{}, std::move(ch)});
    return nodes.size() - 1;
  };
  const auto root = build(build, full);
  return {Hierarchy::from_nodes(std::move(nodes), root), opt[full]};
}

/// The recursive balanced-ternary hierarchy: up to three members sit flat
/// under the root, larger sets split into three groups whose sizes differ by
/// at most one (larger groups first).
inline Hierarchy uniform_optimal_build(std::span<const MemberId> members) {
  if (members.empty()) throw ValidationError("uniform_optimal_build: n must be at least 1");
  if (members.size() == 1) return Hierarchy::leaf(members[0]);
  if (members.size() <= 3) {
    std::vector<Hierarchy> leaves;
    for (const auto& m : members) leaves.push_back(Hierarchy::leaf(m));
    return combine(leaves);
  }
  const auto n = members.size();
  std::vector<Hierarchy> parts;
  std::size_t start = 0;
  for (std::size_t g = 0; g < 3; ++g) {
    const auto len = n / 3 + (g < n % 3 ? 1 : 0);
    parts.push_back(uniform_optimal_build(members.subspan(start, len)));
    start += len;
  }
  return combine(parts);
}

/// Member ids u1..un.
inline std::vector<MemberId> numbered_members(std::size_t n, const std::string& prefix = "u") {
  std::vector<MemberId> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline Hierarchy uniform_optimal_build(std::size_t n) {
  if (n == 0) throw ValidationError("uniform_optimal_build: n must be at least 1");
  const auto ids = numbered_members(n);
  return uniform_optimal_build(std::span<const MemberId>(ids));
}

/// Closed-form optimum for n unit-weight members under unit multicast cost.
/// With k = 3^floor(log3 n):
///   f(n) = 3n·floor(log3 n) + 4(n - k)   for k <= n < 2k
///   f(n) = 3n·floor(log3 n) + 5n - 6k    for 2k <= n < 3k
inline Cost uniform_optimal_cost_f(std::uint64_t n) {
  if (n == 0) throw ValidationError("f(n) is undefined for n = 0");
  std::uint64_t k = 1, lg = 0;
  while (k <= n / 3) {
    k *= 3;
    ++lg;
  }
  const Cost base = checked_mul(checked_mul(3, n), lg);
  if (n < 2 * k) return checked_add(base, checked_mul(4, n - k));
  return checked_add(base, checked_mul(5, n) - 6 * k);
}

/// Entropy-style lower bound Σ_v 3·w_v·log3(W / w_v) on the optimum under
/// uniform multicast cost. Compare with a relative tolerance of 1e-9.
inline long double weighted_lower_bound(const WeightMap& weights) {
  long double total = 0;
  for (const auto& [m, w] : weights) {
    if (w == 0) throw ValidationError("member " + m + " has zero weight");
    total += static_cast<long double>(w);
  }
  long double bound = 0;
  for (const auto& [m, w] : weights) {
    const auto wv = static_cast<long double>(w);
    bound += 3.0L * wv * std::log(total / wv) / std::log(3.0L);
  }
  return bound;
}

inline constexpr double kLowerBoundRelTol = 1e-9;

/// bound <= cost, allowing the documented relative slack on the bound.
inline bool respects_lower_bound(long double bound, Cost cost) {
  return bound <= static_cast<long double>(cost) * (1.0L + kLowerBoundRelTol);
}

}  // namespace khier
