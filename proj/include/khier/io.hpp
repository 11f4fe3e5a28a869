#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "khier/hierarchy.hpp"
#include "khier/instance.hpp"

namespace khier {

inline constexpr std::string_view kInstanceHeader = "khier-instance v1";
inline constexpr std::string_view kHierarchyHeader = "khier-hierarchy v1";

namespace detail {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

struct Line {
  std::size_t number;  // 1-based
  std::vector<Token> tokens;
};

/// Splits into whitespace-separated tokens per line. `#` starts a comment
/// unless a digit follows it (`#12` is a node reference).
inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0, pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto raw = text.substr(pos, end - pos);
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] == ' ' || raw[i] == '\t') {
        ++i;
        continue;
      }
      if (raw[i] == '#' && (i + 1 == raw.size() || raw[i + 1] < '0' || raw[i + 1] > '9')) break;
      const auto start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t') ++i;
      line.tokens.push_back({std::string(raw.substr(start, i - start)), start + 1});
    }
    if (!line.tokens.empty()) out.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

inline std::uint64_t parse_uint(const Token& t, std::size_t line, const char* what) {
  std::uint64_t v = 0;
  const auto* b = t.text.data();
  const auto* e = b + t.text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e || t.text.empty() || t.text[0] == '+')
    throw ParseError(line, t.column, std::string("expected a non-negative integer ") + what +
                                         ", got '" + t.text + "'");
  return v;
}

inline const std::string& parse_id(const Token& t, std::size_t line) {
  if (!valid_token(t.text)) throw ParseError(line, t.column, "invalid identifier '" + t.text + "'");
  return t.text;
}

inline void expect_header(const std::vector<Line>& lines, std::string_view header) {
  if (lines.empty()) throw ParseError(1, 1, "missing header '" + std::string(header) + "'");
  const auto& l = lines.front();
  std::string joined;
  for (const auto& t : l.tokens) joined += (joined.empty() ? "" : " ") + t.text;
  if (joined != header)
    throw ParseError(l.number, 1, "expected header '" + std::string(header) + "'");
}

}  // namespace detail

/// Reads and fully validates an instance file.
inline Instance parse_instance(std::string_view text) {
  const auto lines = detail::tokenize(text);
  detail::expect_header(lines, kInstanceHeader);

  Instance inst;
  bool have_kind = false, have_root = false;
  std::map<std::pair<VertexId, VertexId>, std::size_t> edge_line;
  std::map<MemberId, std::size_t> member_line;
  struct PendingSubset {
    std::size_t line;
    std::size_t column;
    std::vector<MemberId> ids;
  };
  std::vector<PendingSubset> subsets;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [n, tok] = lines[li];
    const auto& head = tok[0].text;
    auto arity = [&](std::size_t want) {
      if (tok.size() != want)
        throw ParseError(n, tok[0].column, "'" + head + "' takes " + std::to_string(want - 1) +
                                               " argument(s)");
    };
    if (head == "kind") {
      arity(2);
      if (have_kind) throw ParseError(n, tok[0].column, "duplicate 'kind' line");
      if (tok[1].text == "tree") inst.network.kind = NetworkKind::tree;
      else if (tok[1].text == "graph") inst.network.kind = NetworkKind::graph;
      else if (tok[1].text == "table") inst.network.kind = NetworkKind::table;
      else throw ParseError(n, tok[1].column, "unknown kind '" + tok[1].text + "'");
      have_kind = true;
    } else if (head == "root") {
      arity(2);
      if (have_root) throw ParseError(n, tok[0].column, "duplicate 'root' line");
      inst.controller = detail::parse_id(tok[1], n);
      have_root = true;
    } else if (head == "edge") {
      arity(4);
      Edge e{detail::parse_id(tok[1], n), detail::parse_id(tok[2], n),
             detail::parse_uint(tok[3], n, "edge cost")};
      if (e.u == e.v) throw ParseError(n, tok[1].column, "self-loop at vertex " + e.u);
      auto key = std::minmax(e.u, e.v);
      auto [it, fresh] = edge_line.emplace(std::pair{key.first, key.second}, n);
      if (!fresh)
        throw ParseError(n, tok[0].column, "duplicate edge " + e.u + " " + e.v + " (first on line " +
                                               std::to_string(it->second) + ")");
      inst.network.edges.push_back(std::move(e));
    } else if (head == "member") {
      arity(3);
      const auto& id = detail::parse_id(tok[1], n);
      const auto w = detail::parse_uint(tok[2], n, "weight");
      if (w == 0) throw ParseError(n, tok[2].column, "member weight must be at least 1");
      if (!member_line.emplace(id, n).second)
        throw ParseError(n, tok[1].column, "duplicate member " + id);
      inst.weights.emplace(id, w);
    } else if (head == "mcast") {
      if (tok.size() < 3) throw ParseError(n, tok[0].column, "'mcast' needs a cost and members");
      const auto cost = detail::parse_uint(tok[1], n, "multicast cost");
      PendingSubset p{n, tok[0].column, {}};
      for (std::size_t i = 2; i < tok.size(); ++i) p.ids.push_back(detail::parse_id(tok[i], n));
      std::sort(p.ids.begin(), p.ids.end());
      if (std::adjacent_find(p.ids.begin(), p.ids.end()) != p.ids.end())
        throw ParseError(n, tok[0].column, "member repeated in 'mcast' subset");
      if (!inst.network.table.emplace(p.ids, cost).second)
        throw ParseError(n, tok[0].column, "duplicate 'mcast' subset");
      subsets.push_back(std::move(p));
    } else {
      throw ParseError(n, tok[0].column, "unknown directive '" + head + "'");
    }
  }

  if (!have_kind) throw ParseError(0, 0, "missing 'kind' line");
  if (!have_root) throw ParseError(0, 0, "missing 'root' line");
  if (inst.weights.empty()) throw ParseError(0, 0, "no members");
  const bool table = inst.network.kind == NetworkKind::table;
  if (table && !edge_line.empty())
    throw ParseError(edge_line.begin()->second, 1, "'edge' is not allowed for kind table");
  if (!table && !subsets.empty())
    throw ParseError(subsets.front().line, 1, "'mcast' is only allowed for kind table");
  for (const auto& p : subsets)
    for (const auto& m : p.ids)
      if (!inst.weights.count(m)) throw ParseError(p.line, p.column, "unknown member " + m);
  if (!table) {
    IndexedGraph g(inst.network, inst.controller);
    for (const auto& [m, line] : member_line)
      if (g.find(m) == npos) throw ParseError(line, 1, "member " + m + " is not a vertex of the network");
  }
  try {
    validate_instance(inst);
  } catch (const ValidationError& e) {
    throw ParseError(0, 0, e.what());
  }
  return inst;
}

/// Canonical form: header, kind, root, edges in stored order, members by id,
/// table subsets in key order.
inline std::string write_instance(const Instance& inst) {
  std::ostringstream os;
  os << kInstanceHeader << '\n';
  os << "kind " << to_string(inst.network.kind) << '\n';
  os << "root " << inst.controller << '\n';
  for (const auto& e : inst.network.edges) os << "edge " << e.u << ' ' << e.v << ' ' << e.cost << '\n';
  for (const auto& [m, w] : inst.weights) os << "member " << m << ' ' << w << '\n';
  for (const auto& [subset, cost] : inst.network.table) {
    os << "mcast " << cost;
    for (const auto& m : subset) os << ' ' << m;
    os << '\n';
  }
  return os.str();
}

/// Reads a hierarchy file. Structure and member names are checked here;
/// whether the leaves cover the instance is left to validate_hierarchy().
inline Hierarchy parse_hierarchy(std::string_view text, const Instance& inst) {
  const auto lines = detail::tokenize(text);
  detail::expect_header(lines, kHierarchyHeader);
  if (lines.size() < 2) throw ParseError(0, 0, "hierarchy has no nodes");

  auto check_member = [&](const detail::Token& t, std::size_t line) {
    const auto& id = detail::parse_id(t, line);
    if (!inst.weights.count(id)) throw ParseError(line, t.column, "unknown member " + id);
    return id;
  };

  const auto& first = lines[1];
  if (first.tokens[0].text == "leaf") {
    if (first.tokens.size() != 2) throw ParseError(first.number, 1, "'leaf' takes one member");
    if (lines.size() > 2) throw ParseError(lines[2].number, 1, "nothing may follow a 'leaf' line");
    return Hierarchy::leaf(check_member(first.tokens[1], first.number));
  }

  // Pass 1: declare node ids in file order.
  std::map<std::string, std::size_t> decl;  // "#id" -> index of its node line
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [n, tok] = lines[li];
    if (tok[0].text != "node") throw ParseError(n, tok[0].column, "expected 'node', got '" + tok[0].text + "'");
    if (tok.size() < 2) throw ParseError(n, tok[0].column, "'node' needs an id");
    const auto& id = tok[1].text;
    if (id.size() < 2 || id[0] != '#' ||
        !std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw ParseError(n, tok[1].column, "malformed node id '" + id + "'");
    if (tok.size() < 3) throw ParseError(n, tok[0].column, "node " + id + " has no children");
    if (!decl.emplace(id, li - 1).second) throw ParseError(n, tok[1].column, "duplicate node id " + id);
  }

  // Pass 2: arena with internal nodes first (file order), then leaves.
  const auto internal = lines.size() - 1;
  std::vector<HierarchyNode> nodes(internal);
  std::vector<char> referenced(internal, 0);
  std::set<MemberId> seen_members;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [n, tok] = lines[li];
    for (std::size_t i = 2; i < tok.size(); ++i) {
      const auto& t = tok[i];
      if (t.text[0] == '#') {
        auto it = decl.find(t.text);
        if (it == decl.end()) throw ParseError(n, t.column, "undeclared node " + t.text);
        if (it->second <= li - 1)
          throw ParseError(n, t.column, "node " + t.text + " is defined earlier: cycle");
        if (referenced[it->second]) throw ParseError(n, t.column, "node " + t.text + " has two parents");
        referenced[it->second] = 1;
        nodes[li - 1].children.push_back(it->second);
      } else {
        const auto id = check_member(t, n);
        if (!seen_members.insert(id).second)
          throw ParseError(n, t.column, "member " + id + " appears on more than one leaf");
        nodes.push_back({id, {}});
        nodes[li - 1].children.push_back(nodes.size() - 1);
      }
    }
  }
  for (std::size_t i = 1; i < internal; ++i)
    if (!referenced[i]) throw ParseError(lines[i + 1].number, 1, "node is not reachable from the root");
  return Hierarchy::from_nodes(std::move(nodes), 0);
}

/// Preorder numbering from #0 at the root; child order is kept.
inline std::string write_hierarchy(const Hierarchy& h) {
  detail::checked_postorder(h);
  std::ostringstream os;
  os << kHierarchyHeader << '\n';
  if (h.is_leaf()) {
    os << "leaf " << h.node(h.root()).member << '\n';
    return os.str();
  }
  std::vector<std::size_t> number(h.size(), npos);
  std::vector<NodeId> order;
  std::vector<NodeId> stack{h.root()};
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    number[id] = order.size();
    order.push_back(id);
    const auto& ch = h.node(id).children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it)
      if (!h.node(*it).is_leaf()) stack.push_back(*it);
  }
  for (auto id : order) {
    os << "node #" << number[id];
    for (auto c : h.node(id).children) {
      if (h.node(c).is_leaf())
        os << ' ' << h.node(c).member;
      else
        os << " #" << number[c];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace khier
