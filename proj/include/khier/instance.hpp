#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "khier/common.hpp"
#include "khier/cost.hpp"
#include "khier/multicast.hpp"

namespace khier {

/// Members with weights, the routing side and the controller vertex.
struct Instance {
  RoutingNetwork network;
  VertexId controller = "r";
  WeightMap weights;  // one entry per member

  std::vector<MemberId> members() const {
    std::vector<MemberId> out;
    out.reserve(weights.size());
    for (const auto& [m, w] : weights) out.push_back(m);
    return out;
  }

  Weight total_weight() const {
    Weight t = 0;
    for (const auto& [m, w] : weights) t = checked_add(t, w);
    return t;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline bool valid_token(const std::string& s) {
  if (s.empty() || s.front() == '#') return false;
  for (unsigned char c : s)
    if (c <= ' ' || c == 0x7f) return false;
  return true;
}

/// Throws ValidationError describing the first problem found.
inline void validate_instance(const Instance& inst) {
  if (inst.weights.empty()) throw ValidationError("instance has no members");
  if (!valid_token(inst.controller)) throw ValidationError("invalid controller id");
  for (const auto& [m, w] : inst.weights) {
    if (!valid_token(m)) throw ValidationError("invalid member id '" + m + "'");
    if (w == 0) throw ValidationError("member " + m + " has zero weight");
  }
  const auto members = inst.members();
  check_network(inst.network, inst.controller, members);
  for (const auto& [subset, cost] : inst.network.table) {
    if (subset.empty()) throw ValidationError("empty subset in multicast table");
    for (const auto& m : subset)
      if (!inst.weights.count(m)) throw ValidationError("multicast table names unknown member " + m);
  }
}

/// The oracle matching the instance kind, or M ≡ 1 when `uniform` is set.
inline std::unique_ptr<MulticastOracle> make_oracle(const Instance& inst, bool uniform = false) {
  if (uniform) return std::make_unique<UniformOracle>();
  switch (inst.network.kind) {
    case NetworkKind::tree: return std::make_unique<TreeOracle>(inst.network, inst.controller);
    case NetworkKind::graph: {
      const auto members = inst.members();
      return std::make_unique<GraphOracle>(inst.network, inst.controller, members);
    }
    case NetworkKind::table: return std::make_unique<TableOracle>(inst.network.table);
  }
  throw ValidationError("unknown network kind");
}

}  // namespace khier
