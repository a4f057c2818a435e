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

// Ground truth for small instances: exact LPs, exhaustive integer search and
// a complementary-slackness checker for the l1 dual
//
//   max  sum_i a_i beta_i
//   s.t. -w_i <= beta_i <= w_i
//        beta_i + alpha_i - sum_{p parent of i} alpha_p <= 0
//        alpha >= 0
//
// (w_i = 1 when unweighted).

#ifndef HIERSMOOTH_ORACLE_HPP_
#define HIERSMOOTH_ORACLE_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hiersmooth/bilayer.hpp"
#include "hiersmooth/instance.hpp"
#include "hiersmooth/rational.hpp"
#include "hiersmooth/simplex.hpp"

namespace hiersmooth {

struct DualCertificate {
  std::vector<Rational> alpha;
  std::vector<Rational> beta;
};

struct ExactSolution {
  Assignment x;
  Rational objective_value;
  LPSolution lp;  // raw solve, kept for dual extraction
  Norm norm = Norm::kL1;
  bool weighted = false;
};

// Desk-scale guard for the dense tableau.
inline constexpr std::size_t kOracleMaxNodes = 60;

namespace detail {

// Variables: x_0..x_{n-1}, then d_0..d_{n-1} (l1) or a single t (linf).
// Rows 3i, 3i+1, 3i+2 are the lower deviation, upper deviation and sum
// constraint of node i.
inline LPProblem build_lp(const Instance& inst, Norm norm, bool weighted) {
  const std::size_t n = inst.size();
  LPProblem lp;
  const bool l1 = norm == Norm::kL1;
  lp.num_vars = l1 ? 2 * n : n + 1;
  lp.objective.assign(lp.num_vars, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (l1) lp.objective[n + i] = weighted ? inst.weight(i) : 1;
  }
  if (!l1) lp.objective[n] = 1;
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t dev = l1 ? n + i : n;
    lp.constraints.push_back({{{dev, 1}, {i, 1}}, Relation::kGreaterEqual, inst.a(i)});
    lp.constraints.push_back({{{dev, 1}, {i, -1}}, Relation::kGreaterEqual, Rational(-inst.a(i))});
    LPConstraint sum{{{i, 1}}, Relation::kGreaterEqual, 0};
    for (NodeId c : inst.children(i)) sum.terms.push_back({c, -1});
    lp.constraints.push_back(std::move(sum));
  }
  return lp;
}

}  // namespace detail

inline ExactSolution solve_lp_exact(const Instance& inst, Norm norm, bool weighted = false) {
  if (weighted && (norm != Norm::kL1 || !inst.has_weights())) {
    throw std::invalid_argument("weighted exact solve needs l1 and weights");
  }
  if (inst.size() > kOracleMaxNodes) {
    throw std::length_error("instance too large for the exact oracle");
  }
  ExactSolution sol;
  sol.norm = norm;
  sol.weighted = weighted;
  sol.lp = solve_lp(detail::build_lp(inst, norm, weighted));
  if (sol.lp.status != LPStatus::kOptimal) {
    throw std::logic_error("smoothing LP not optimal; x = 0 is always feasible");
  }
  sol.x.assign(sol.lp.x.begin(), sol.lp.x.begin() + static_cast<std::ptrdiff_t>(inst.size()));
  sol.objective_value = sol.lp.objective;
  return sol;
}

// Dual values of the l1 LP mapped to (alpha, beta): beta_i is the difference
// of the two deviation-row multipliers, alpha_i the sum-row multiplier.
inline DualCertificate extract_dual(const Instance& inst, const ExactSolution& sol) {
  if (sol.norm != Norm::kL1 || sol.lp.status != LPStatus::kOptimal) {
    throw std::invalid_argument("extract_dual needs an optimal l1 solve");
  }
  DualCertificate cert;
  cert.alpha.resize(inst.size());
  cert.beta.resize(inst.size());
  for (NodeId i = 0; i < inst.size(); ++i) {
    cert.beta[i] = sol.lp.duals[3 * i] - sol.lp.duals[3 * i + 1];
    cert.alpha[i] = sol.lp.duals[3 * i + 2];
  }
  return cert;
}

inline Rational dual_objective(const Instance& inst, const DualCertificate& cert) {
  Rational v = 0;
  for (NodeId i = 0; i < inst.size(); ++i) v += inst.a(i) * cert.beta[i];
  return v;
}

// Dual feasibility plus complementary slackness with x. Acceptance proves x
// optimal for the (weighted when `weighted`) l1 objective.
inline bool check_certificate(const Instance& inst, const Assignment& x,
                              const DualCertificate& cert, bool weighted = false) {
  const std::size_t n = inst.size();
  if (x.size() != n || cert.alpha.size() != n || cert.beta.size() != n) {
    throw std::invalid_argument("check_certificate: length mismatch");
  }
  for (NodeId i = 0; i < n; ++i) {
    const Rational w = weighted ? inst.weight(i) : 1;
    const Rational& beta = cert.beta[i];
    const Rational& alpha = cert.alpha[i];
    if (beta < -w || beta > w || alpha < 0) return false;
    Rational reduced = beta + alpha;
    for (NodeId p : inst.parents(i)) reduced -= cert.alpha[p];
    if (reduced > 0) return false;
    // Complementary slackness: each primal slack must meet a tight dual.
    if (x[i] > inst.a(i) && beta != -w) return false;
    if (x[i] < inst.a(i) && beta != w) return false;
    if (x[i] > children_sum(inst, x, i) && alpha != 0) return false;
    if (x[i] > 0 && reduced != 0) return false;
  }
  return true;
}

struct BruteForceResult {
  Assignment x;
  Rational objective_value;
};

inline constexpr double kBruteForceMaxPoints = 1e8;

// Exhaustive minimum over integral x in [0, bound]^n. Nodes are fixed in
// topological order so every sum constraint is checked as soon as its node
// is set; partial cost prunes against the incumbent.
inline BruteForceResult brute_force_integral(const Instance& inst, std::int64_t bound,
                                             bool weighted = false) {
  const std::size_t n = inst.size();
  if (bound < 0) throw std::invalid_argument("brute_force_integral: negative bound");
  if (weighted && !inst.has_weights()) throw std::invalid_argument("instance has no weights");
  if (static_cast<double>(n) * std::log(static_cast<double>(bound) + 1) >
      std::log(kBruteForceMaxPoints)) {
    throw std::length_error("brute_force_integral: search space exceeds guard");
  }
  for (const Rational& a : inst.a()) {
    if (!is_integral(a)) throw std::invalid_argument("brute_force_integral: non-integral target");
  }
  const std::vector<NodeId>& order = inst.topo_order();
  std::vector<std::int64_t> a(n);
  std::vector<std::int64_t> w(n);
  for (NodeId i = 0; i < n; ++i) {
    a[i] = inst.a(i).get_num().get_si();
    w[i] = weighted ? inst.weight(i) : 1;
  }
  std::vector<std::int64_t> x(n, 0);
  std::vector<std::int64_t> best_x;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();

  // Explicit stack over positions in `order`; next[k] is the next value to try.
  std::vector<std::int64_t> cost_prefix(n + 1, 0);
  std::vector<std::int64_t> next(n, 0);
  std::size_t k = 0;
  next[0] = 0;
  while (true) {
    if (k == n) {
      if (cost_prefix[n] < best) {
        best = cost_prefix[n];
        best_x = x;
      }
      --k;
      continue;
    }
    NodeId v = order[k];
    if (next[k] > bound) {
      if (k == 0) break;
      next[k] = 0;
      --k;
      continue;
    }
    std::int64_t value = next[k]++;
    std::int64_t kids = 0;
    for (NodeId c : inst.children(v)) kids += x[c];
    if (value < kids) {
      next[k] = kids;
      continue;
    }
    std::int64_t c = cost_prefix[k] + w[v] * (value > a[v] ? value - a[v] : a[v] - value);
    if (c >= best) {
      // Larger values only cost more once past a_v.
      if (value >= a[v]) next[k] = bound + 1;
      continue;
    }
    x[v] = value;
    cost_prefix[k + 1] = c;
    ++k;
    if (k < n) next[k] = 0;
  }
  if (best_x.empty()) throw std::logic_error("brute_force_integral: no feasible point");
  BruteForceResult result;
  result.x.resize(n);
  for (NodeId i = 0; i < n; ++i) result.x[i] = best_x[i];
  result.objective_value = best;
  return result;
}

// Exact optimum of a covering LP (used to check the bilayer reduction).
inline Rational solve_covering_exact(const CoveringLP& cov) {
  LPProblem lp;
  lp.num_vars = cov.columns.size();
  lp.objective.assign(lp.num_vars, Rational(1));
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    lp.constraints.push_back({{{j, 1}}, Relation::kLessEqual, cov.caps[j]});
  }
  for (std::size_t r = 0; r < cov.rows.size(); ++r) {
    LPConstraint row{{}, Relation::kGreaterEqual, cov.demand[r]};
    for (std::size_t j : cov.rows[r]) row.terms.push_back({j, 1});
    lp.constraints.push_back(std::move(row));
  }
  LPSolution sol = solve_lp(lp);
  if (sol.status != LPStatus::kOptimal) throw InfeasibleError("covering LP has no solution");
  return sol.objective;
}

}  // namespace hiersmooth

#endif  // HIERSMOOTH_ORACLE_HPP_
