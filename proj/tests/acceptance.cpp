// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Exact optima come from the subset recursion and, where cheap,
// from explicit tree enumeration in oracles.hpp.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace khier;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

WeightMap unit_weights(const std::vector<MemberId>& ms) {
  WeightMap w;
  for (const auto& m : ms) w[m] = 1;
  return w;
}

bool within(Cost cost, Cost opt, std::uint64_t num, std::uint64_t den) {
  return static_cast<unsigned __int128>(cost) * den <= static_cast<unsigned __int128>(opt) * num;
}

Hierarchy L(const char* m) { return Hierarchy::leaf(m); }

Instance random_instance(std::mt19937_64& rng, GenKind kind, std::size_t n, Weight max_weight) {
  GenSpec g;
  g.kind = kind;
  g.n = n;
  g.seed = rng();
  g.max_weight = max_weight;
  g.max_edge_cost = 1 + rng() % 20;
  g.extra_edge_factor = Rational(static_cast<std::int64_t>(rng() % 4), 2);
  return gen_random(g);
}

// 1 -------------------------------------------------------------------------
Outcome fig1_member_cost() {
  auto ids = [](std::initializer_list<const char*> xs) { return std::vector<MemberId>(xs.begin(), xs.end()); };
  const TableOracle t(std::map<std::vector<MemberId>, Cost>{{ids({"U1", "U2"}), 3},
                                                            {ids({"U3", "U4", "U5"}), 5},
                                                            {ids({"U1", "U2", "U3", "U4", "U5"}), 7},
                                                            {ids({"U6"}), 1},
                                                            {ids({"U7", "U8", "U9"}), 4},
                                                            {ids({"U3"}), 3},
                                                            {ids({"U4"}), 3},
                                                            {ids({"U5"}), 3}});
  const auto h = combine({combine({combine({L("U1"), L("U2")}), combine({L("U3"), L("U4"), L("U5")})}),
                          L("U6"), combine({L("U7"), L("U8"), L("U9")})});
  const auto c = eval_cost_member(h, "U4", t);
  if (c != 29) return fail("U4 costs " + std::to_string(c));
  if (oracle::member_cost(h, "U4", t) != 29) return fail("naive evaluation disagrees");
  return {true, "U4 = 29"};
}

// 2 -------------------------------------------------------------------------
Outcome brute_force_matches_f() {
  const Cost f[] = {0, 4, 9, 16, 23, 30, 38, 46, 54};
  UniformOracle u;
  double n9_seconds = 0;
  for (std::size_t n = 1; n <= 9; ++n) {
    const auto ms = numbered_members(n);
    const auto start = std::chrono::steady_clock::now();
    const auto r = brute_force_opt(ms, unit_weights(ms), u);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    if (n == 9) n9_seconds = took.count();
    if (r.cost != f[n - 1]) return fail("n=" + std::to_string(n) + ": " + std::to_string(r.cost));
    if (uniform_optimal_cost_f(n) != f[n - 1]) return fail("closed form at n=" + std::to_string(n));
  }
  if (n9_seconds > 300) return fail("n=9 took " + std::to_string(n9_seconds) + "s");
  char buf[64];
  std::snprintf(buf, sizeof buf, "n=1..9 match, n=9 in %.2fs", n9_seconds);
  return {true, buf};
}

// 3 -------------------------------------------------------------------------
Outcome two_cost_forms_agree() {
  std::mt19937_64 rng(1001);
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto n = 1 + rng() % 10;
    const auto ms = numbered_members(n, "x");
    const auto h = oracle::random_hierarchy(ms, rng, true);
    const auto w = oracle::random_weights(ms, rng, 1 + rng() % 1000);
    const auto salt = rng();
    oracle::FnOracle m([&](const std::vector<MemberId>& s) { return oracle::hashed_cost(s, salt, 500); });
    const auto by_node = eval_cost_total(h, w, m).total;
    Cost by_member = 0;
    for (const auto& x : ms) by_member += w.at(x) * eval_cost_member(h, x, m);
    if (by_node != by_member || by_node != oracle::weighted_sum_cost(h, w, m))
      return fail("trial " + std::to_string(t));
  }
  return {true, std::to_string(trials) + " triples"};
}

// 4 -------------------------------------------------------------------------
Outcome lower_bound_below_opt() {
  std::mt19937_64 rng(1004);
  UniformOracle u;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto n = 1 + rng() % 7;
    const auto ms = numbered_members(n, "w");
    const auto w = oracle::random_weights(ms, rng, 1 + rng() % 100);
    const auto opt = brute_force_opt(ms, w, u).cost;
    if (!respects_lower_bound(weighted_lower_bound(w), opt)) return fail("trial " + std::to_string(t));
  }
  return {true, std::to_string(trials) + " instances"};
}

// 5 -------------------------------------------------------------------------
Outcome binarize_within_three() {
  std::mt19937_64 rng(1005);
  UniformOracle u;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const auto n = 1 + rng() % 12;
    auto ms = numbered_members(n, "b");
    std::sort(ms.begin(), ms.end());
    const auto h = oracle::random_hierarchy(ms, rng);
    const auto w = oracle::random_weights(ms, rng, 1 + rng() % 50);
    const auto b = binarize(h, w);
    if (!oracle::is_binary(b)) return fail("not binary, trial " + std::to_string(t));
    if (oracle::sorted_leaves(oracle::to_tree(b)) != ms) return fail("leaves changed, trial " + std::to_string(t));
    if (hierarchy_cost(b, w, u) > 3 * hierarchy_cost(h, w, u)) return fail("cost, trial " + std::to_string(t));
  }
  return {true, std::to_string(trials) + " hierarchies"};
}

// 6 -------------------------------------------------------------------------
Outcome ptas_bound() {
  std::mt19937_64 rng(1006);
  UniformOracle u;
  int runs = 0, light_empty = 0;
  for (auto eps : {Rational(1), Rational(1, 3)}) {
    for (int t = 0; t < 150; ++t) {
      const auto n = 1 + rng() % 7;
      const auto ms = numbered_members(n, "e");
      const auto w = oracle::random_weights(ms, rng, 1 + rng() % 40);
      PtasParams p;
      p.epsilon = eps;
      const auto out = ptas_structure(ms, w, p);
      const auto cost = hierarchy_cost(out.hierarchy, w, u);
      const auto opt = brute_force_opt(ms, w, u).cost;
      const auto a = static_cast<std::uint64_t>(eps.num), b = static_cast<std::uint64_t>(eps.den);
      if (!within(cost, opt, b + 3 * a, b)) return fail("cost " + std::to_string(cost) + " vs " + std::to_string(opt));
      if (out.heavy_count == n) {
        ++light_empty;
        if (!within(cost, opt, b + a, b)) return fail("empty light set, cost " + std::to_string(cost));
      }
      ++runs;
    }
  }
  return {true, std::to_string(runs) + " runs, " + std::to_string(light_empty) + " with no light members"};
}

// 7 -------------------------------------------------------------------------
Outcome approx_tree_bound() {
  const RoutingNetwork star{NetworkKind::tree, {{"r", "u", 1}, {"u", "v1", 1}, {"u", "v2", 1}, {"u", "v3", 1}}, {}};
  const std::vector<MemberId> vs{"v1", "v2", "v3"};
  const TreeOracle st(star, "r");
  const auto sc = hierarchy_cost(approx_tree(star, "r", vs, unit_weights(vs)), unit_weights(vs), st);
  const auto so = brute_force_opt(vs, unit_weights(vs), st).cost;
  if (sc != 23 || so != 18) return fail("star gives " + std::to_string(sc) + " vs " + std::to_string(so));

  std::mt19937_64 rng(1007);
  RoutedParams params;  // eps = 1/2
  const auto a = static_cast<std::uint64_t>(params.epsilon.num), b = static_cast<std::uint64_t>(params.epsilon.den);
  const int trials = 150;
  long double worst = 0;
  for (int t = 0; t < trials; ++t) {
    const auto n = 1 + rng() % 7;
    const auto inst = random_instance(rng, GenKind::random_tree, n, 1 + rng() % 30);
    const auto ms = inst.members();
    const TreeOracle m(inst.network, "r");
    const auto cost = hierarchy_cost(approx_tree(inst.network, "r", ms, inst.weights, params), inst.weights, m);
    const auto opt = brute_force_opt(ms, inst.weights, m).cost;
    if (!within(cost, opt, 11 * b + a, b)) return fail("trial " + std::to_string(t));
    if (opt) worst = std::max(worst, static_cast<long double>(cost) / opt);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "star 23 vs 18, %d instances, worst ratio %.4Lf", trials, worst);
  return {true, buf};
}

// 8 -------------------------------------------------------------------------
Outcome uniform_weight_trees() {
  std::mt19937_64 rng(1008);
  const int trials = 150;
  long double worst = 0;
  std::size_t steps = 0;
  for (int t = 0; t < trials; ++t) {
    const auto n = 2 + rng() % 6;
    const auto inst = random_instance(rng, GenKind::random_tree, n, 1);
    const auto ms = inst.members();
    const TreeOracle m(inst.network, "r");
    RoutedTrace trace;
    const auto h = approx_tree(inst.network, "r", ms, inst.weights, {}, &trace);
    for (const auto& s : trace.steps) {
      ++steps;
      if (!s.partition.balanced) return fail("unbalanced partition, trial " + std::to_string(t));
    }
    const auto cost = hierarchy_cost(h, inst.weights, m);
    const auto opt = brute_force_opt(ms, inst.weights, m).cost;
    if (!within(cost, opt, 42, 10)) return fail("ratio above 4.2, trial " + std::to_string(t));
    worst = std::max(worst, static_cast<long double>(cost) / opt);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d instances, %zu balanced levels, worst ratio %.4Lf", trials, steps, worst);
  return {true, buf};
}

// 9 -------------------------------------------------------------------------
Outcome approx_graph_bound() {
  std::mt19937_64 rng(1009);
  RoutedParams params;
  params.last.gamma = Rational(7);
  const int trials = 150;
  std::size_t lasts = 0;
  long double worst = 0;
  for (int t = 0; t < trials; ++t) {
    const auto n = 1 + rng() % 6;
    const auto inst = random_instance(rng, GenKind::random_graph, n, 1 + rng() % 30);
    const auto ms = inst.members();
    const GraphOracle m(inst.network, "r", ms);
    RoutedTrace trace;
    const auto h = approx_graph(inst.network, "r", ms, inst.weights, params, &trace);
    for (const auto& s : trace.steps) {
      ++lasts;
      if (!check_last(s.metric, s.last, params.last).ok()) return fail("LAST guarantee, trial " + std::to_string(t));
    }
    const auto cost = hierarchy_cost(h, inst.weights, m);
    const auto opt = brute_force_opt(ms, inst.weights, m).cost;
    if (cost > 75 * opt) return fail("trial " + std::to_string(t));
    if (opt) worst = std::max(worst, static_cast<long double>(cost) / opt);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d graphs, %zu LASTs checked, worst ratio %.4Lf", trials, lasts, worst);
  return {true, buf};
}

// 10 ------------------------------------------------------------------------
Outcome three_partition_golden() {
  const auto g = gen_3partition({{5, 6, 7}, 18, 50, 28225});
  const auto& inst = g.instance;
  const auto ms = inst.members();
  const TreeOracle m(inst.network, "r");
  const auto opt = brute_force_opt(ms, inst.weights, m).cost;
  const Cost W = 55 + 56 + 57;
  const Cost closed = 28225 * 3 * W * 1 + W * W;
  if (closed != 14253624) return fail("closed form " + std::to_string(closed));
  if (opt != closed) return fail("brute force " + std::to_string(opt));
  if (oracle::exhaustive_opt(ms, inst.weights, m) != closed) return fail("enumeration disagrees");
  return {true, "optimum 14253624"};
}

// 11 ------------------------------------------------------------------------
Outcome determinism() {
  std::mt19937_64 rng(1011);
  int solved = 0;
  for (int t = 0; t < 20; ++t) {
    const auto kind = t % 2 ? GenKind::random_graph : GenKind::random_tree;
    const auto inst = random_instance(rng, kind, 1 + rng() % 7, 1 + rng() % 20);
    for (auto alg : {Algorithm::brute, Algorithm::uniform_opt, Algorithm::ptas, Algorithm::huffman,
                     Algorithm::approx_tree, Algorithm::approx_graph}) {
      if (alg == Algorithm::approx_tree && kind != GenKind::random_tree) continue;
      if (alg == Algorithm::approx_graph && kind != GenKind::random_graph) continue;
      SolveParams p;
      p.uniform_oracle = alg == Algorithm::ptas;
      const auto a = write_hierarchy(solve(inst, alg, p).hierarchy);
      const auto b = write_hierarchy(solve(inst, alg, p).hierarchy);
      if (a != b) return fail(std::string(to_string(alg)) + " differs, trial " + std::to_string(t));
      ++solved;
    }
  }
  for (auto kind : {GenKind::random_tree, GenKind::random_graph}) {
    RatioConfig c;
    c.alg = kind == GenKind::random_tree ? Algorithm::approx_tree : Algorithm::approx_graph;
    c.gen.kind = kind;
    c.n_min = 1;
    c.n_max = 7;
    c.trials = 5;
    c.seed = 77;
    const auto first = ratio_csv(run_ratio(c));
    const auto again = ratio_csv(run_ratio(c));
    c.threads = 4;
    const auto threaded = ratio_csv(run_ratio(c));
    if (first != again || first != threaded) return fail(std::string("ratio output for ") + to_string(c.alg));
  }
  return {true, std::to_string(solved) + " solver pairs, ratio CSV stable for 1 and 4 threads"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"worked example member cost", fig1_member_cost},
      {"exact optimum equals f(n)", brute_force_matches_f},
      {"per-member and per-node costs agree", two_cost_forms_agree},
      {"weighted lower bound", lower_bound_below_opt},
      {"binarize within 3x", binarize_within_three},
      {"ptas bound", ptas_bound},
      {"approx-tree bound", approx_tree_bound},
      {"uniform-weight trees", uniform_weight_trees},
      {"approx-graph bound and LAST guarantees", approx_graph_bound},
      {"3-partition optimum", three_partition_golden},
      {"determinism", determinism},
  };
  int failures = 0, i = 0;
  for (const auto& [name, run] : criteria) {
    ++i;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    std::printf("%s %d: %s (%s)\n", o.ok ? "PASS" : "FAIL", i, name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.ok;
  }
  return failures ? 1 : 0;
}
