#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "khier/common.hpp"
#include "khier/instance.hpp"

namespace khier {

/// xoshiro256** seeded through splitmix64. The stream is part of the file
/// format contract: generated instances are golden data.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    const auto result = rotl(s_[1] * 5, 7) * 9;
    const auto t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// lo + next() mod (hi - lo + 1). The modulo bias is accepted; it keeps the
  /// recurrence trivial to reproduce elsewhere.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw ValidationError("empty range");
    const auto span = hi - lo + 1;
    return span == 0 ? next() : lo + next() % span;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

enum class GenKind { random_tree, random_graph };

inline const char* to_string(GenKind k) {
  return k == GenKind::random_tree ? "random-tree" : "random-graph";
}

inline GenKind parse_gen_kind(const std::string& s) {
  if (s == "random-tree") return GenKind::random_tree;
  if (s == "random-graph") return GenKind::random_graph;
  throw ValidationError("unknown generator kind '" + s + "'");
}

struct GenSpec {
  GenKind kind = GenKind::random_tree;
  std::size_t n = 5;
  std::uint64_t seed = 0;
  Weight max_weight = 10;
  Cost max_edge_cost = 10;
  Rational extra_edge_factor{1, 2};  // random-graph only
};

/// Random tree: routers s1..s(n-1), each hung under a uniformly chosen
/// earlier vertex (r first); then members m1..mn, each hung under a uniform
/// choice among r and the routers. Draw order per edge: endpoint, cost; then
/// one weight per member. Random graph: the same tree plus
/// floor(factor·n) extra edges between distinct non-adjacent vertices, each
/// drawn as (u, v, cost) and redrawn on a clash.
inline Instance gen_random(const GenSpec& spec) {
  if (spec.n < 1) throw ValidationError("n must be at least 1");
  if (spec.max_weight < 1 || spec.max_edge_cost < 1)
    throw ValidationError("max weight and max edge cost must be at least 1");
  if (spec.extra_edge_factor.num < 0) throw ValidationError("extra edge factor must be non-negative");

  Rng rng(spec.seed);
  Instance inst;
  inst.controller = "r";
  inst.network.kind = spec.kind == GenKind::random_tree ? NetworkKind::tree : NetworkKind::graph;
  std::vector<VertexId> vertices{"r"};
  auto& edges = inst.network.edges;

  for (std::size_t i = 1; i < spec.n; ++i) {
    const auto parent = rng.uniform(0, vertices.size() - 1);
    const auto cost = rng.uniform(1, spec.max_edge_cost);
    auto name = "s" + std::to_string(i);
    edges.push_back({vertices[parent], name, cost});
    vertices.push_back(std::move(name));
  }
  const auto routers = vertices.size();
  for (std::size_t i = 1; i <= spec.n; ++i) {
    const auto parent = rng.uniform(0, routers - 1);
    const auto cost = rng.uniform(1, spec.max_edge_cost);
    auto name = "m" + std::to_string(i);
    edges.push_back({vertices[parent], name, cost});
    vertices.push_back(std::move(name));
  }
  for (std::size_t i = 1; i <= spec.n; ++i)
    inst.weights["m" + std::to_string(i)] = rng.uniform(1, spec.max_weight);

  if (spec.kind == GenKind::random_graph) {
    std::set<std::pair<std::size_t, std::size_t>> present;
    std::map<VertexId, std::size_t> idx;
    for (std::size_t i = 0; i < vertices.size(); ++i) idx[vertices[i]] = i;
    for (const auto& e : edges) present.insert(std::minmax(idx[e.u], idx[e.v]));
    const auto nv = vertices.size();
    const auto room = nv * (nv - 1) / 2 - present.size();
    const auto want = static_cast<std::size_t>(
        static_cast<unsigned __int128>(spec.extra_edge_factor.num) * spec.n /
        static_cast<unsigned __int128>(spec.extra_edge_factor.den));
    const auto extra = std::min(want, room);
    for (std::size_t added = 0; added < extra;) {
      const auto a = rng.uniform(0, nv - 1);
      const auto b = rng.uniform(0, nv - 1);
      const auto cost = rng.uniform(1, spec.max_edge_cost);
      if (a == b || !present.insert(std::minmax(a, b)).second) continue;
      edges.push_back({vertices[a], vertices[b], cost});
      ++added;
    }
  }
  validate_instance(inst);
  return inst;
}

struct ThreePartitionSpec {
  std::vector<std::uint64_t> sizes;  // 3m positive sizes
  std::uint64_t B = 0;
  Weight base_weight = 0;  // w
  Cost C = 0;              // cost of the controller edge
};

struct GeneratedInstance {
  Instance instance;
  std::vector<std::string> warnings;
};

/// Smallest power of three >= n, and its exponent.
inline std::pair<std::uint64_t, std::uint64_t> power_of_three_at_least(std::uint64_t n) {
  std::uint64_t p = 1, e = 0;
  while (p < n) {
    p = checked_mul(p, 3);
    ++e;
  }
  return {p, e};
}

/// Star r -u- v_i for the 3-Partition reduction: edge (r,u) costs C, edge
/// (u,v_i) costs w_i = w + size_i, member v_i has weight w_i. Element counts
/// that are not a power of three are padded with (B, 0, 0) groups.
inline GeneratedInstance gen_3partition(const ThreePartitionSpec& spec) {
  const auto count = spec.sizes.size();
  if (count == 0 || count % 3 != 0) throw ValidationError("need 3m sizes with m >= 1");
  const auto m = count / 3;
  std::uint64_t sum = 0;
  for (auto s : spec.sizes) {
    // B/4 < s < B/2, exactly.
    if (!(4 * s > spec.B && 2 * s < spec.B))
      throw ValidationError("size " + std::to_string(s) + " is outside (B/4, B/2)");
    sum = checked_add(sum, s);
  }
  if (sum != checked_mul(m, spec.B)) throw ValidationError("sizes must sum to m·B");
  if (spec.base_weight == 0) throw ValidationError("base weight must be positive");

  auto sizes = spec.sizes;
  const auto [padded, log3] = power_of_three_at_least(count);
  while (sizes.size() < padded) {
    sizes.push_back(spec.B);
    sizes.push_back(0);
    sizes.push_back(0);
  }

  GeneratedInstance out;
  auto& inst = out.instance;
  inst.controller = "r";
  inst.network.kind = NetworkKind::tree;
  inst.network.edges.push_back({"r", "u", spec.C});
  Weight wmin = kInfinity, wmax = 0, total = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto w = checked_add(spec.base_weight, sizes[i]);
    const auto name = "v" + std::to_string(i + 1);
    inst.network.edges.push_back({"u", name, w});
    inst.weights[name] = w;
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
    total = checked_add(total, w);
  }

  // w_max / w_min < (3NL + 1) / (3NL) with N elements and L = log3 N.
  const auto k = checked_mul(checked_mul(3, padded), log3);
  if (k > 0 && !(static_cast<unsigned __int128>(wmax) * k <
                 static_cast<unsigned __int128>(wmin) * (k + 1)))
    throw ValidationError("base weight too small: w_max/w_min must stay below (3NL+1)/(3NL)");
  if (k == 0 && wmax != wmin) throw ValidationError("base weight too small");

  // C > W²·L is what the reduction needs; below it we only warn.
  const auto floor = static_cast<unsigned __int128>(total) * total * log3;
  if (static_cast<unsigned __int128>(spec.C) <= floor)
    out.warnings.push_back("C is not above W^2·log3(N); the optimum need not be balanced ternary");
  validate_instance(inst);
  return out;
}

struct ThreeDMatchingSpec {
  std::uint64_t q = 0;
  std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> triples;  // 1-based
  Cost c = 0;
};

/// Graph for the 3D-Matching reduction: element vertices w_x, u_y, v_z (the
/// members, unit weight), one vertex t_i per triple joined to its three
/// elements, a hub s joined to every t_i, and the controller r joined to s
/// at cost c. All other edges cost 1. q is padded up to a power of three by
/// adding one fresh matched triple per new element index.
inline GeneratedInstance gen_3dmatching(const ThreeDMatchingSpec& spec) {
  if (spec.q == 0) throw ValidationError("q must be at least 1");
  if (spec.triples.empty()) throw ValidationError("need at least one triple");
  std::vector<char> hit_w(spec.q + 1, 0), hit_u(spec.q + 1, 0), hit_v(spec.q + 1, 0);
  for (const auto& [x, y, z] : spec.triples) {
    if (x < 1 || x > spec.q || y < 1 || y > spec.q || z < 1 || z > spec.q)
      throw ValidationError("triple index outside 1..q");
    hit_w[x] = hit_u[y] = hit_v[z] = 1;
  }
  for (std::uint64_t i = 1; i <= spec.q; ++i)
    if (!hit_w[i] || !hit_u[i] || !hit_v[i])
      throw ValidationError("element " + std::to_string(i) + " is in no triple; the graph would be disconnected");

  auto triples = spec.triples;
  const auto q = power_of_three_at_least(spec.q).first;
  for (auto i = spec.q + 1; i <= q; ++i) triples.emplace_back(i, i, i);

  GeneratedInstance out;
  auto& inst = out.instance;
  inst.controller = "r";
  inst.network.kind = NetworkKind::graph;
  auto& edges = inst.network.edges;
  edges.push_back({"r", "s", spec.c});
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto t = "t" + std::to_string(i + 1);
    const auto& [x, y, z] = triples[i];
    edges.push_back({"s", t, 1});
    edges.push_back({t, "w" + std::to_string(x), 1});
    edges.push_back({t, "u" + std::to_string(y), 1});
    edges.push_back({t, "v" + std::to_string(z), 1});
  }
  for (std::uint64_t i = 1; i <= q; ++i) {
    inst.weights["w" + std::to_string(i)] = 1;
    inst.weights["u" + std::to_string(i)] = 1;
    inst.weights["v" + std::to_string(i)] = 1;
  }
  validate_instance(inst);
  return out;
}

}  // namespace khier
