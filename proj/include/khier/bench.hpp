#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "khier/approx_routed.hpp"
#include "khier/approx_uniform.hpp"
#include "khier/cost.hpp"
#include "khier/exact.hpp"
#include "khier/generators.hpp"
#include "khier/instance.hpp"

namespace khier {

enum class Algorithm { brute, uniform_opt, ptas, huffman, approx_tree, approx_graph };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::brute: return "brute";
    case Algorithm::uniform_opt: return "uniform-opt";
    case Algorithm::ptas: return "ptas";
    case Algorithm::huffman: return "huffman";
    case Algorithm::approx_tree: return "approx-tree";
    case Algorithm::approx_graph: return "approx-graph";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  for (auto a : {Algorithm::brute, Algorithm::uniform_opt, Algorithm::ptas, Algorithm::huffman,
                 Algorithm::approx_tree, Algorithm::approx_graph})
    if (s == to_string(a)) return a;
  throw ValidationError("unknown algorithm '" + s + "'");
}

struct SolveParams {
  Rational epsilon{1, 2};
  Rational gamma{7};
  std::size_t brute_cap = kDefaultBruteForceCap;
  std::size_t heavy_set_cap = kDefaultBruteForceCap;
  bool uniform_oracle = false;  // evaluate (and, for brute, search) with M ≡ 1
};

struct Solution {
  Hierarchy hierarchy;
  Cost cost = 0;
};

/// Runs one algorithm and prices its output with the oracle the parameters
/// select. Mismatches between algorithm, oracle and network kind are
/// InfeasibleError.
inline Solution solve(const Instance& inst, Algorithm alg, const SolveParams& p) {
  const auto members = inst.members();
  const auto oracle = make_oracle(inst, p.uniform_oracle);
  Solution s;
  switch (alg) {
    case Algorithm::brute: {
      BruteForceConfig cfg;
      cfg.max_members = p.brute_cap;
      auto r = brute_force_opt(members, inst.weights, *oracle, cfg);
      s.hierarchy = std::move(r.hierarchy);
      break;
    }
    case Algorithm::uniform_opt:
      s.hierarchy = uniform_optimal_build(std::span<const MemberId>(members));
      break;
    case Algorithm::ptas: {
      PtasParams q;
      q.epsilon = p.epsilon;
      q.heavy_set_cap = p.heavy_set_cap;
      q.brute_force_cap = p.brute_cap;
      s.hierarchy = ptas_build(members, inst.weights, *oracle, q);
      break;
    }
    case Algorithm::huffman:
      s.hierarchy = huffman_binary_build(members, inst.weights);
      break;
    case Algorithm::approx_tree:
    case Algorithm::approx_graph: {
      RoutedParams q;
      q.epsilon = p.epsilon;
      q.last.gamma = p.gamma;
      q.heavy_set_cap = p.heavy_set_cap;
      s.hierarchy = alg == Algorithm::approx_tree
                        ? approx_tree(inst.network, inst.controller, members, inst.weights, q)
                        : approx_graph(inst.network, inst.controller, members, inst.weights, q);
      break;
    }
  }
  s.cost = eval_cost_total(s.hierarchy, inst.weights, *oracle).total;
  return s;
}

enum class Baseline { brute_opt, lower_bound };

inline const char* to_string(Baseline b) { return b == Baseline::brute_opt ? "brute-opt" : "lower-bound"; }

inline Baseline parse_baseline(const std::string& s) {
  if (s == "brute-opt") return Baseline::brute_opt;
  if (s == "lower-bound") return Baseline::lower_bound;
  throw ValidationError("unknown baseline '" + s + "'");
}

struct RatioConfig {
  Algorithm alg = Algorithm::approx_tree;
  GenSpec gen;  // n and seed are overwritten per trial
  std::size_t n_min = 1, n_max = 1;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  Baseline baseline = Baseline::brute_opt;
  SolveParams params;
  unsigned threads = 1;
};

struct RatioRecord {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Algorithm alg{};
  Cost cost = 0;
  Baseline baseline{};
  long double baseline_value = 0;
  long double ratio = 0;
};

inline constexpr const char* kRatioHeader = "n,seed,alg,cost,baseline,baseline_value,ratio";

inline std::string format_ratio_row(const RatioRecord& r) {
  char buf[64];
  std::ostringstream os;
  os << r.n << ',' << r.seed << ',' << to_string(r.alg) << ',' << r.cost << ',' << to_string(r.baseline)
     << ',';
  if (r.baseline == Baseline::brute_opt) {
    os << static_cast<Cost>(r.baseline_value);
  } else {
    std::snprintf(buf, sizeof buf, "%.6Lf", r.baseline_value);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "%.6Lf", r.ratio);
  os << ',' << buf;
  return os.str();
}

/// Checks a ratio configuration up front so failures are reported before any
/// work starts.
inline void check_ratio_config(const RatioConfig& cfg) {
  if (cfg.n_min < 1 || cfg.n_max < cfg.n_min) throw ValidationError("invalid n range");
  if (cfg.baseline == Baseline::brute_opt && cfg.n_max > cfg.params.brute_cap)
    throw InfeasibleError("n up to " + std::to_string(cfg.n_max) + " exceeds the brute-force cap of " +
                          std::to_string(cfg.params.brute_cap));
  if (cfg.baseline == Baseline::lower_bound && !cfg.params.uniform_oracle)
    throw InfeasibleError("the lower-bound baseline holds for the uniform oracle only");
  if (cfg.alg == Algorithm::approx_tree && cfg.gen.kind != GenKind::random_tree)
    throw InfeasibleError("approx-tree needs random-tree instances");
  if (cfg.alg == Algorithm::approx_graph && cfg.gen.kind != GenKind::random_graph)
    throw InfeasibleError("approx-graph needs random-graph instances");
  if (cfg.alg == Algorithm::ptas && !cfg.params.uniform_oracle)
    throw InfeasibleError("ptas needs the uniform oracle");
}

/// One record per (n, trial); trial t uses seed + t. Rows come back in
/// (n, trial) order whatever the thread count.
inline std::vector<RatioRecord> run_ratio(const RatioConfig& cfg) {
  check_ratio_config(cfg);
  struct Job {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto n = cfg.n_min; n <= cfg.n_max; ++n)
    for (std::size_t t = 0; t < cfg.trials; ++t) jobs.push_back({n, cfg.seed + t});

  std::vector<RatioRecord> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  auto run_one = [&](std::size_t i) {
    try {
      GenSpec g = cfg.gen;
      g.n = jobs[i].n;
      g.seed = jobs[i].seed;
      const auto inst = gen_random(g);
      RatioRecord r;
      r.n = g.n;
      r.seed = g.seed;
      r.alg = cfg.alg;
      r.baseline = cfg.baseline;
      r.cost = solve(inst, cfg.alg, cfg.params).cost;
      if (cfg.baseline == Baseline::brute_opt) {
        r.baseline_value = static_cast<long double>(solve(inst, Algorithm::brute, cfg.params).cost);
      } else {
        r.baseline_value = weighted_lower_bound(inst.weights);
      }
      r.ratio = r.baseline_value > 0 ? static_cast<long double>(r.cost) / r.baseline_value
                                     : (r.cost == 0 ? 1.0L : 0.0L);
      out[i] = r;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const auto threads = std::max(1u, cfg.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (auto i = next++; i < jobs.size(); i = next++) run_one(i);
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline std::string ratio_csv(const std::vector<RatioRecord>& rows) {
  std::string s = std::string(kRatioHeader) + "\n";
  for (const auto& r : rows) s += format_ratio_row(r) + "\n";
  return s;
}

}  // namespace khier
