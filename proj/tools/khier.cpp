// khier: solve, evaluate, generate and benchmark key hierarchies.
//
// Exit codes: 0 ok, 1 usage, 2 unreadable or malformed input,
// 3 infeasible request or invalid hierarchy.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "khier/khier.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;

struct ParseFailure {
  std::string what;
};

struct UsageFailure {
  std::string what;
};

// Interprets a flag value; any failure is a usage error.
template <class F>
auto arg(F&& f) {
  try {
    return f();
  } catch (const khier::Error& e) {
    throw UsageFailure{e.what()};
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseFailure{"cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw khier::InfeasibleError("cannot write " + path);
  out << text;
}

khier::Instance load_instance(const std::string& path) {
  const auto text = read_file(path);
  try {
    return khier::parse_instance(text);
  } catch (const khier::ParseError& e) {
    throw ParseFailure{path + ": " + e.what()};
  }
}

std::size_t brute_cap() {
  const char* env = std::getenv("KHIER_BRUTE_CAP");
  if (!env || !*env) return khier::kDefaultBruteForceCap;
  char* end = nullptr;
  const auto v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 24) throw khier::ValidationError("KHIER_BRUTE_CAP must be 1..24");
  return static_cast<std::size_t>(v);
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  std::pair<std::size_t, std::size_t> r;
  try {
    if (dots == std::string::npos) {
      r.first = r.second = std::stoull(s);
    } else {
      r = {std::stoull(s.substr(0, dots)), std::stoull(s.substr(dots + 2))};
    }
  } catch (const std::exception&) {
    throw khier::ValidationError("bad range '" + s + "', expected LO..HI");
  }
  if (r.first < 1 || r.second < r.first) throw khier::ValidationError("bad range '" + s + "', need 1 <= LO <= HI");
  return r;
}

std::vector<std::uint64_t> parse_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw khier::ValidationError("bad list item '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key hierarchy construction and evaluation"};
  app.require_subcommand(1);

  // solve
  std::string alg_name, instance_path, out_path, eps_text = "0.5", gamma_text = "7";
  bool uniform = false;
  auto* solve = app.add_subcommand("solve", "Build a hierarchy and print it with its cost");
  solve->add_option("--alg", alg_name, "brute|uniform-opt|ptas|huffman|approx-tree|approx-graph")->required();
  solve->add_option("--instance", instance_path, "Instance file")->required();
  solve->add_option("--out", out_path, "Write the hierarchy here instead of standard output");
  solve->add_option("--eps", eps_text, "Epsilon in (0,1], decimal or p/q");
  solve->add_option("--gamma", gamma_text, "LAST trade-off parameter");
  solve->add_flag("--uniform-oracle", uniform, "Use M = 1 for every subset");

  // eval
  std::string hierarchy_path;
  auto* eval = app.add_subcommand("eval", "Print total and per-member cost of a hierarchy");
  eval->add_option("--instance", instance_path, "Instance file")->required();
  eval->add_option("--hierarchy", hierarchy_path, "Hierarchy file")->required();
  eval->add_flag("--uniform-oracle", uniform, "Use M = 1 for every subset");

  // ratio
  std::string kind_name = "random-tree", range_text = "3..7", baseline_name = "brute-opt";
  std::string factor_text = "1/2";
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  khier::Weight max_weight = 10;
  khier::Cost max_edge_cost = 10;
  auto* ratio = app.add_subcommand("ratio", "Approximation ratios over random instances, as CSV");
  ratio->add_option("--alg", alg_name, "Algorithm under test")->required();
  ratio->add_option("--kind", kind_name, "random-tree|random-graph");
  ratio->add_option("--n-range", range_text, "Member counts LO..HI");
  ratio->add_option("--trials", trials, "Trials per member count");
  ratio->add_option("--seed", seed, "Seed of the first trial");
  ratio->add_option("--baseline", baseline_name, "brute-opt|lower-bound");
  ratio->add_option("--threads", threads, "Worker threads");
  ratio->add_option("--max-weight", max_weight, "Largest member weight");
  ratio->add_option("--max-edge-cost", max_edge_cost, "Largest edge cost");
  ratio->add_option("--extra-edge-factor", factor_text, "Extra edges per member (graphs)");
  ratio->add_option("--eps", eps_text, "Epsilon in (0,1]");
  ratio->add_option("--gamma", gamma_text, "LAST trade-off parameter");
  ratio->add_flag("--uniform-oracle", uniform, "Use M = 1 for every subset");

  // generate
  std::size_t n = 5;
  std::string sizes_text, triples_text;
  std::uint64_t big_b = 0, base_w = 0, root_cost = 0, q = 0;
  auto* generate = app.add_subcommand("generate", "Write a generated instance");
  generate->add_option("--kind", kind_name, "random-tree|random-graph|3partition|3dmatching");
  generate->add_option("--n", n, "Member count (random kinds)");
  generate->add_option("--seed", seed, "Seed (random kinds)");
  generate->add_option("--max-weight", max_weight, "Largest member weight");
  generate->add_option("--max-edge-cost", max_edge_cost, "Largest edge cost");
  generate->add_option("--extra-edge-factor", factor_text, "Extra edges per member (graphs)");
  generate->add_option("--sizes", sizes_text, "3partition: comma-separated sizes");
  generate->add_option("--B", big_b, "3partition: target sum B");
  generate->add_option("--w", base_w, "3partition: base weight");
  generate->add_option("--C", root_cost, "3partition: controller edge cost");
  generate->add_option("--q", q, "3dmatching: set size");
  generate->add_option("--triples", triples_text, "3dmatching: x,y,z;x,y,z;...");
  generate->add_option("--c", root_cost, "3dmatching: controller edge cost");
  generate->add_option("--out", out_path, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    khier::SolveParams params;
    params.epsilon = arg([&] { return khier::Rational::parse(eps_text); });
    params.gamma = arg([&] { return khier::Rational::parse(gamma_text); });
    params.uniform_oracle = uniform;
    params.brute_cap = arg(brute_cap);
    if (params.gamma.num <= 0) throw UsageFailure{"gamma must be positive"};
    if (params.epsilon.num <= 0 || khier::Rational(1) < params.epsilon)
      throw UsageFailure{"eps must lie in (0, 1]"};

    if (solve->parsed()) {
      const auto alg = arg([&] { return khier::parse_algorithm(alg_name); });
      const auto inst = load_instance(instance_path);
      const auto sol = khier::solve(inst, alg, params);
      write_output(out_path, khier::write_hierarchy(sol.hierarchy));
      std::cout << "cost " << sol.cost << '\n';
    } else if (eval->parsed()) {
      const auto inst = load_instance(instance_path);
      const auto text = read_file(hierarchy_path);
      khier::Hierarchy h;
      try {
        h = khier::parse_hierarchy(text, inst);
      } catch (const khier::ParseError& e) {
        throw ParseFailure{hierarchy_path + ": " + e.what()};
      }
      const auto members = inst.members();
      const auto violations = khier::validate_hierarchy(h, members);
      for (const auto& v : violations)
        if (v.severity == khier::Violation::Severity::warning) std::cerr << "warning: " << v.message << '\n';
      if (khier::has_errors(violations)) {
        for (const auto& v : violations)
          if (v.severity == khier::Violation::Severity::error) std::cerr << "error: " << v.message << '\n';
        return kExitInfeasible;
      }
      const auto oracle = khier::make_oracle(inst, uniform);
      const auto b = khier::eval_cost_total(h, inst.weights, *oracle);
      std::cout << "total " << b.total << '\n';
      for (const auto& [m, c] : b.per_member) std::cout << "member " << m << ' ' << c << '\n';
    } else if (ratio->parsed()) {
      khier::RatioConfig cfg;
      cfg.alg = arg([&] { return khier::parse_algorithm(alg_name); });
      cfg.gen.kind = arg([&] { return khier::parse_gen_kind(kind_name); });
      cfg.gen.max_weight = max_weight;
      cfg.gen.max_edge_cost = max_edge_cost;
      cfg.gen.extra_edge_factor = arg([&] { return khier::Rational::parse(factor_text); });
      std::tie(cfg.n_min, cfg.n_max) = arg([&] { return parse_range(range_text); });
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.baseline = arg([&] { return khier::parse_baseline(baseline_name); });
      cfg.params = params;
      cfg.threads = threads;
      if (trials == 0) {
        khier::check_ratio_config(cfg);
        std::cout << khier::kRatioHeader << '\n';
        return 0;
      }
      std::cout << khier::ratio_csv(khier::run_ratio(cfg));
    } else if (generate->parsed()) {
      khier::GeneratedInstance g;
      if (kind_name == "3partition") {
        khier::ThreePartitionSpec s;
        s.sizes = arg([&] { return parse_list(sizes_text); });
        s.B = big_b;
        s.base_weight = base_w;
        s.C = root_cost;
        g = khier::gen_3partition(s);
      } else if (kind_name == "3dmatching") {
        khier::ThreeDMatchingSpec s;
        s.q = q;
        s.c = root_cost;
        std::stringstream ss(triples_text);
        std::string item;
        while (std::getline(ss, item, ';')) {
          const auto t = arg([&] { return parse_list(item); });
          if (t.size() != 3) throw UsageFailure{"each triple needs three indices"};
          s.triples.emplace_back(t[0], t[1], t[2]);
        }
        g = khier::gen_3dmatching(s);
      } else {
        khier::GenSpec s;
        s.kind = arg([&] { return khier::parse_gen_kind(kind_name); });
        s.n = n;
        s.seed = seed;
        s.max_weight = max_weight;
        s.max_edge_cost = max_edge_cost;
        s.extra_edge_factor = arg([&] { return khier::Rational::parse(factor_text); });
        g.instance = khier::gen_random(s);
      }
      for (const auto& w : g.warnings) std::cerr << "warning: " << w << '\n';
      write_output(out_path, khier::write_instance(g.instance));
    }
  } catch (const UsageFailure& e) {
    std::cerr << "error: " << e.what << '\n';
    return kExitUsage;
  } catch (const ParseFailure& e) {
    std::cerr << "error: " << e.what << '\n';
    return kExitParse;
  } catch (const khier::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const khier::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  }
  return 0;
}
