/*
Copyright 2026 The hiersmooth Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// hiersmooth command-line front end.
//
//   hiersmooth solve  [--norm=l1|linf] [--algorithm=dfs|abstract|fptas] [--weighted]
//                     [--tol=R] [--eps=R] [--out=PATH] [FILE|-]
//   hiersmooth oracle [--norm=l1|linf] [--weighted] [--out=PATH] [FILE|-]
//   hiersmooth verify (solve flags) [FILE|-]
//   hiersmooth gen    figure1|tree|path|bilayer [--nodes=N] [--seed=N] ...
//   hiersmooth bench  [--sizes=N,N,...] [--shape=random|path] [--seed=N]
//
// Exit codes: 0 success, 1 input error, 2 shape error, 3 verification
// mismatch. Solutions and CSV go to stdout (or --out); stats go to stderr.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hiersmooth/hiersmooth.hpp"

namespace hs = hiersmooth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitShape = 2;
constexpr int kExitMismatch = 3;

// Raised for bad flags or unreadable input; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string norm = "l1";
  std::string algorithm;  // empty: pick from the shape
  bool weighted = false;
  std::string tol;
  std::string eps = "1/10";
  std::string out;
  std::string input = "-";
  bool inject_fault = false;

  // gen / bench
  std::string family;
  std::size_t nodes = 12;
  std::uint64_t seed = 1;
  std::int64_t max_a = 10;
  std::int64_t max_w = 4;
  std::size_t nu = 4;
  std::size_t nw = 3;
  std::uint64_t edge_prob = 50;
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::string shape = "random";
};

hs::Rational parse_positive(const std::string& text, const char* flag) {
  auto r = hs::parse_rational(text);
  if (!r || *r <= 0) throw UsageError(std::string(flag) + " must be a positive rational, got '" + text + "'");
  return *r;
}

hs::Instance read_instance(const std::string& path) {
  if (path == "-") return hs::parse_instance(std::cin);
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return hs::parse_instance(in);
}

void write_output(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + cfg.out + "'");
  out << text;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// What a solve produced, whatever the solver.
struct Outcome {
  hs::Assignment x;
  hs::Rational objective;
  std::string algorithm;
  hs::Rational eps;           // fptas only
  hs::Rational tol;           // linf only
  hs::Rational t_star;        // linf only
};

Outcome run_solver(const Config& cfg, const hs::Instance& inst) {
  const hs::ShapeReport shape = hs::validate(inst);
  Outcome o;
  const auto start = std::chrono::steady_clock::now();

  if (cfg.norm == "linf") {
    if (!cfg.algorithm.empty()) throw UsageError("--algorithm applies to --norm=l1 only");
    o.algorithm = "linf";
    o.tol = cfg.tol.empty() ? hs::default_linf_tolerance(inst) : parse_positive(cfg.tol, "--tol");
    hs::LinfResult r = hs::solve_linf(inst, o.tol);
    o.x = std::move(r.x);
    o.objective = r.objective_value;
    o.t_star = r.t_star;
    std::cerr << "t_star=" << hs::to_string(r.t_star) << " seconds=" << seconds_since(start) << "\n";
    return o;
  }

  std::string algorithm = cfg.algorithm;
  if (algorithm.empty()) algorithm = shape.is_tree ? "dfs" : "fptas";
  o.algorithm = algorithm;
  if (algorithm == "fptas") {
    if (cfg.weighted) throw UsageError("--weighted is not supported by the bilayer solver");
    if (!hs::is_depth_one(inst)) {
      throw hs::ShapeError("l1 needs a tree or a bilayer graph, got " +
                           std::string(hs::to_string(shape.kind)));
    }
    o.eps = parse_positive(cfg.eps, "--eps");
    if (o.eps > 1) throw UsageError("--eps must be at most 1");
    hs::CoveringStats stats;
    hs::SolveReport r = hs::solve_bilayer_l1(inst, o.eps, &stats);
    o.x = std::move(r.x);
    o.objective = r.objective_value;
    std::cerr << "probes=" << stats.budget_probes << " iterations=" << stats.mw_iterations
              << " lower_bound=" << stats.lower_bound << " seconds=" << seconds_since(start) << "\n";
    return o;
  }

  hs::SolveReport r;
  if (algorithm == "dfs") {
    r = hs::solve_l1_dfs(inst, cfg.weighted);
  } else {
    if (cfg.weighted) throw UsageError("--algorithm=abstract is unweighted only");
    r = hs::solve_l1_abstract(inst);
  }
  o.x = std::move(r.x);
  o.objective = r.objective_value;
  std::cerr << "pushes=" << r.stats.pushes << " visits=" << r.stats.dfs_visits
            << " seconds=" << seconds_since(start) << "\n";
  return o;
}

void check_flags(const Config& cfg) {
  if (cfg.norm != "l1" && cfg.norm != "linf") throw UsageError("--norm must be l1 or linf");
  if (cfg.weighted && cfg.norm != "l1") throw UsageError("--weighted requires --norm=l1");
}

int cmd_solve(const Config& cfg) {
  check_flags(cfg);
  hs::Instance inst = read_instance(cfg.input);
  if (cfg.weighted && !inst.has_weights()) throw UsageError("--weighted given but the instance has no weights");
  Outcome o = run_solver(cfg, inst);
  write_output(cfg, hs::format_solution(o.x, o.objective));
  return kExitOk;
}

int cmd_oracle(const Config& cfg) {
  check_flags(cfg);
  hs::Instance inst = read_instance(cfg.input);
  if (cfg.weighted && !inst.has_weights()) throw UsageError("--weighted given but the instance has no weights");
  if (inst.size() > hs::kOracleMaxNodes) {
    throw UsageError("instance has " + std::to_string(inst.size()) + " nodes; the exact oracle takes at most " +
                     std::to_string(hs::kOracleMaxNodes));
  }
  hs::ExactSolution s =
      hs::solve_lp_exact(inst, cfg.norm == "l1" ? hs::Norm::kL1 : hs::Norm::kLinf, cfg.weighted);
  write_output(cfg, hs::format_solution(s.x, s.objective_value));
  return kExitOk;
}

int cmd_verify(const Config& cfg) {
  check_flags(cfg);
  hs::Instance inst = read_instance(cfg.input);
  if (cfg.weighted && !inst.has_weights()) throw UsageError("--weighted given but the instance has no weights");
  if (inst.size() > hs::kOracleMaxNodes) {
    throw UsageError("instance too large to verify (limit " + std::to_string(hs::kOracleMaxNodes) + " nodes)");
  }
  Outcome o = run_solver(cfg, inst);
  if (cfg.inject_fault) {
    // Negative control: nudge the first node so the check has something to catch.
    o.x[0] += 1;
    o.objective = hs::objective(inst, o.x, cfg.norm == "l1" ? hs::Norm::kL1 : hs::Norm::kLinf, cfg.weighted);
  }
  const hs::Norm norm = cfg.norm == "l1" ? hs::Norm::kL1 : hs::Norm::kLinf;
  hs::ExactSolution exact = hs::solve_lp_exact(inst, norm, cfg.weighted);

  const bool feasible = hs::is_feasible(inst, o.x);
  const bool consistent = hs::objective(inst, o.x, norm, cfg.weighted) == o.objective;
  bool match = false;
  std::string rule;
  if (o.algorithm == "fptas") {
    match = o.objective <= (1 + o.eps) * exact.objective_value;
    rule = "solver <= (1 + " + hs::to_string(o.eps) + ") * oracle";
  } else if (norm == hs::Norm::kLinf) {
    match = o.t_star >= exact.objective_value && o.t_star - exact.objective_value <= o.tol &&
            o.objective <= o.t_star;
    rule = "|t_star - oracle| <= " + hs::to_string(o.tol);
  } else {
    match = o.objective == exact.objective_value;
    rule = "exact equality";
  }
  std::ostringstream report;
  report << "solver " << o.algorithm << " objective " << hs::to_string(o.objective) << "\n";
  report << "oracle objective " << hs::to_string(exact.objective_value) << "\n";
  report << "feasible " << (feasible ? "yes" : "no") << "\n";
  const bool ok = feasible && consistent && match;
  report << (ok ? "MATCH" : "MISMATCH") << " (" << rule << ")\n";
  write_output(cfg, report.str());
  return ok ? kExitOk : kExitMismatch;
}

int cmd_gen(const Config& cfg) {
  std::optional<hs::Instance> inst;
  if (cfg.family == "figure1") {
    inst = hs::figure1_instance();
  } else if (cfg.family == "tree") {
    inst = hs::gen_random_tree(cfg.nodes, cfg.max_a, cfg.seed, cfg.weighted, cfg.max_w);
  } else if (cfg.family == "path") {
    inst = hs::gen_path_tree(cfg.nodes, cfg.max_a, cfg.seed);
  } else if (cfg.family == "bilayer") {
    inst = hs::gen_random_bilayer(cfg.nu, cfg.nw, cfg.edge_prob, cfg.max_a, cfg.seed);
  } else {
    throw UsageError("unknown family '" + cfg.family + "' (figure1, tree, path, bilayer)");
  }
  write_output(cfg, hs::serialize_instance(*inst));
  return kExitOk;
}

// One CSV row per ladder size, run sequentially.
int cmd_bench(const Config& cfg) {
  if (cfg.shape != "random" && cfg.shape != "path") throw UsageError("--shape must be random or path");
  if (cfg.sizes.empty()) throw UsageError("--sizes is empty");
  std::ostringstream csv;
  csv << "n,seconds,pushes,visits\n";
  for (std::size_t n : cfg.sizes) {
    if (n == 0) throw UsageError("--sizes entries must be positive");
    hs::Instance inst = cfg.shape == "random" ? hs::gen_random_tree(n, cfg.max_a, cfg.seed)
                                              : hs::gen_path_tree(n, cfg.max_a, cfg.seed);
    const auto start = std::chrono::steady_clock::now();
    hs::SolveReport r = hs::solve_l1_dfs(inst);
    const double secs = seconds_since(start);
    csv << n << "," << secs << "," << r.stats.pushes << "," << r.stats.dfs_visits << "\n";
  }
  write_output(cfg, csv.str());
  return kExitOk;
}

void add_solver_flags(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--norm", cfg.norm, "Objective norm")->check(CLI::IsMember({"l1", "linf"}));
  cmd->add_option("--algorithm", cfg.algorithm, "l1 solver (default: dfs on trees, fptas on bilayers)")
      ->check(CLI::IsMember({"dfs", "abstract", "fptas"}));
  cmd->add_flag("--weighted", cfg.weighted, "Use node weights (l1 only)");
  cmd->add_option("--tol", cfg.tol, "linf bisection tolerance, e.g. 1/1000000");
  cmd->add_option("--eps", cfg.eps, "Bilayer approximation factor in (0, 1]");
  cmd->add_option("--out", cfg.out, "Write output here instead of stdout");
  cmd->add_option("input", cfg.input, "Instance file, or - for stdin");
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Sum-based hierarchical smoothing solver"};
  app.require_subcommand(1);

  CLI::App* solve = app.add_subcommand("solve", "Solve an instance");
  add_solver_flags(solve, cfg);
  CLI::App* verify = app.add_subcommand("verify", "Solve and compare with the exact oracle");
  add_solver_flags(verify, cfg);
  verify->add_flag("--inject-fault", cfg.inject_fault, "Corrupt the solver output (negative control)")
      ->group("");

  CLI::App* oracle = app.add_subcommand("oracle", "Exact LP solution (small instances)");
  oracle->add_option("--norm", cfg.norm, "Objective norm")->check(CLI::IsMember({"l1", "linf"}));
  oracle->add_flag("--weighted", cfg.weighted, "Use node weights (l1 only)");
  oracle->add_option("--out", cfg.out, "Write output here instead of stdout");
  oracle->add_option("input", cfg.input, "Instance file, or - for stdin");

  CLI::App* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("family", cfg.family, "figure1, tree, path or bilayer")->required();
  gen->add_option("--nodes", cfg.nodes, "Node count (tree, path)")->check(CLI::PositiveNumber);
  gen->add_option("--seed", cfg.seed, "Generator seed");
  gen->add_option("--max-a", cfg.max_a, "Targets are drawn from [0, max-a]")->check(CLI::NonNegativeNumber);
  gen->add_flag("--weighted", cfg.weighted, "Draw weights (tree)");
  gen->add_option("--max-w", cfg.max_w, "Weights are drawn from [1, max-w]")->check(CLI::PositiveNumber);
  gen->add_option("--nu", cfg.nu, "Bottom layer size (bilayer)")->check(CLI::PositiveNumber);
  gen->add_option("--nw", cfg.nw, "Top layer size (bilayer)")->check(CLI::PositiveNumber);
  gen->add_option("--edge-prob", cfg.edge_prob, "Edge probability in percent (bilayer)")
      ->check(CLI::Range(0, 100));
  gen->add_option("--out", cfg.out, "Write output here instead of stdout");

  CLI::App* bench = app.add_subcommand("bench", "Time the dfs solver over a size ladder");
  bench->add_option("--sizes", cfg.sizes, "Comma-separated sizes")->delimiter(',');
  bench->add_option("--shape", cfg.shape, "random (recursive tree) or path")
      ->check(CLI::IsMember({"random", "path"}));
  bench->add_option("--seed", cfg.seed, "Generator seed");
  bench->add_option("--max-a", cfg.max_a, "Targets are drawn from [0, max-a]")->check(CLI::NonNegativeNumber);
  bench->add_option("--out", cfg.out, "Write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (oracle->parsed()) return cmd_oracle(cfg);
    if (gen->parsed()) return cmd_gen(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
  } catch (const hs::ParseError& e) {
    std::cerr << "error: " << (cfg.input == "-" ? "<stdin>" : cfg.input) << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const hs::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitShape;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
