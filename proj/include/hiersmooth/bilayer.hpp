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

// Approximate l1 smoothing on bilayer graphs (every edge goes from a node
// with no children to a node with no parents).
//
// Some optimal solution keeps every upper node at its target and only lowers
// bottom nodes, so the problem reduces to a covering LP over the decreases
// d_u of the bottom nodes:
//
//   minimize   sum_u d_u
//   subject to sum_{u in C(w)} d_u >= sum_{u in C(w)} a_u - a_w   for each w
//              0 <= d_u <= a_u
//
// solve_covering_mw() finds a (1 + eps)-approximate solution with
// multiplicative weights over the rows. The weights run in doubles; the
// returned d is exact and satisfies every constraint.

#ifndef HIERSMOOTH_BILAYER_HPP_
#define HIERSMOOTH_BILAYER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hiersmooth/instance.hpp"
#include "hiersmooth/l1_tree.hpp"
#include "hiersmooth/rational.hpp"

namespace hiersmooth {

struct CoveringLP {
  // Column j decreases node columns[j]; 0 <= d_j <= caps[j].
  std::vector<NodeId> columns;
  std::vector<Rational> caps;
  // Row r belongs to node row_nodes[r] and needs demand[r] > 0 from the
  // columns listed in rows[r].
  std::vector<NodeId> row_nodes;
  std::vector<Rational> demand;
  std::vector<std::vector<std::size_t>> rows;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// True when no node has both a parent and a child.
inline bool is_depth_one(const Instance& inst) {
  for (NodeId v = 0; v < inst.size(); ++v) {
    if (!inst.parents(v).empty() && !inst.children(v).empty()) return false;
  }
  return true;
}

inline CoveringLP reduce_bilayer(const Instance& inst) {
  if (!is_depth_one(inst)) throw ShapeError("bilayer reduction needs a depth-one graph");
  CoveringLP lp;
  std::vector<std::size_t> column_of(inst.size(), SIZE_MAX);
  for (NodeId v = 0; v < inst.size(); ++v) {
    if (inst.parents(v).empty()) continue;
    column_of[v] = lp.columns.size();
    lp.columns.push_back(v);
    lp.caps.push_back(inst.a(v));
  }
  for (NodeId w = 0; w < inst.size(); ++w) {
    auto kids = inst.children(w);
    if (kids.empty()) continue;
    Rational b = -inst.a(w);
    std::vector<std::size_t> members;
    for (NodeId u : kids) {
      b += inst.a(u);
      members.push_back(column_of[u]);
    }
    if (b <= 0) continue;
    lp.row_nodes.push_back(w);
    lp.demand.push_back(std::move(b));
    lp.rows.push_back(std::move(members));
  }
  return lp;
}

// Row with the smallest coverage ratio (sum of its d) / demand among rows that
// are not yet covered; nullopt when every row is covered. One O(|E|) scan.
inline std::optional<std::size_t> most_violated_constraint(const CoveringLP& lp,
                                                           const std::vector<Rational>& d) {
  if (d.size() != lp.columns.size()) throw std::invalid_argument("d length mismatch");
  std::optional<std::size_t> worst;
  Rational worst_ratio;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    Rational covered = 0;
    for (std::size_t j : lp.rows[r]) covered += d[j];
    if (covered >= lp.demand[r]) continue;
    Rational ratio = covered / lp.demand[r];
    if (!worst || ratio < worst_ratio) {
      worst = r;
      worst_ratio = std::move(ratio);
    }
  }
  return worst;
}

struct CoveringStats {
  std::uint64_t mw_iterations = 0;
  std::uint64_t budget_probes = 0;
  // Certified bounds on the LP optimum.
  double lower_bound = 0;
  double upper_bound = 0;
};

namespace detail {

// Multiplicative-weights solver for one covering LP. Budget probes follow
// Plotkin-Shmoys-Tardos: for a budget B, the easy set is
// {0 <= d <= cap, sum d <= B} and the row weights steer a fractional-knapsack
// oracle toward the least covered rows.
class CoveringSolver {
 public:
  CoveringSolver(const CoveringLP& lp, double eps) : lp_(lp), eps_(eps) {
    k_ = lp.columns.size();
    m_ = lp.rows.size();
    caps_.resize(k_);
    for (std::size_t j = 0; j < k_; ++j) caps_[j] = lp.caps[j].get_d();
    demand_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) demand_[r] = lp.demand[r].get_d();
    col_rows_.assign(k_, {});
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t j : lp.rows[r]) col_rows_[j].push_back(r);
    }
  }

  std::vector<Rational> solve(CoveringStats& stats) {
    // Every row alone forces sum d >= its demand.
    double lower = 0;
    for (double b : demand_) lower = std::max(lower, b);
    best_ = repair(std::vector<Rational>(k_, Rational(0)));
    best_cost_ = cost(best_);
    double upper = best_cost_.get_d();

    const double inner = eps_ / 4;
    double lo_budget = lower;
    double hi_budget = upper;
    for (int probe = 0; probe < kMaxProbes; ++probe) {
      if (upper <= (1 + eps_) * lower) break;
      if (hi_budget <= lo_budget * (1 + inner / 4)) break;
      const double budget = std::sqrt(lo_budget * hi_budget);
      ++stats.budget_probes;
      ProbeResult res = run_budget(budget, inner, stats);
      lower = std::max(lower, res.lagrangian_bound);
      if (res.infeasible) {
        lower = std::max(lower, budget);
        lo_budget = budget;
        continue;
      }
      hi_budget = budget;
      std::vector<Rational> d = repair(to_rational(res.average));
      Rational c = cost(d);
      if (c < best_cost_) {
        best_cost_ = c;
        best_ = std::move(d);
        upper = best_cost_.get_d();
      }
    }
    stats.lower_bound = lower;
    stats.upper_bound = upper;
    return best_;
  }

 private:
  static constexpr int kMaxProbes = 64;
  static constexpr std::uint64_t kMaxIterations = 200000;

  struct ProbeResult {
    bool infeasible = false;
    double lagrangian_bound = 0;
    std::vector<double> average;
  };

  // Best lower bound from multipliers y_r = lambda * p_r / b_r over lambda:
  // L(y) = sum_r b_r y_r - sum_j cap_j * max(0, sum_{r in j} y_r - 1).
  double lagrangian_bound(const std::vector<double>& p) const {
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    std::vector<std::pair<double, double>> slopes;  // (breakpoint 1/s_j, cap_j * s_j)
    for (std::size_t j = 0; j < k_; ++j) {
      double s = 0;
      for (std::size_t r : col_rows_[j]) s += p[r] / demand_[r];
      if (s > 0) slopes.emplace_back(1 / s, caps_[j] * s);
    }
    std::sort(slopes.begin(), slopes.end());
    // Slope in lambda is total minus the sum of cap_j s_j for breakpoints
    // already passed; the maximum sits at the first breakpoint where it turns
    // negative.
    double slope = total;
    double best_lambda = 0;
    for (const auto& [lambda, drop] : slopes) {
      best_lambda = lambda;
      slope -= drop;
      if (slope <= 0) break;
    }
    if (slope > 0) return 0;  // never binds; cannot happen for a feasible LP
    double value = best_lambda * total;
    for (std::size_t j = 0; j < k_; ++j) {
      double s = 0;
      for (std::size_t r : col_rows_[j]) s += p[r] / demand_[r];
      value -= caps_[j] * std::max(0.0, best_lambda * s - 1);
    }
    return std::max(0.0, value * (1 - 1e-9));
  }

  ProbeResult run_budget(double budget, double inner, CoveringStats& stats) {
    ProbeResult res;
    std::vector<double> p(m_, 1.0);
    std::vector<double> d(k_);
    std::vector<double> sum(k_, 0.0);
    std::vector<std::size_t> order(k_);
    std::vector<double> score(k_);

    // Width: largest coverage ratio any oracle answer can reach.
    double width = 1;
    for (std::size_t r = 0; r < m_; ++r) {
      double capsum = 0;
      for (std::size_t j : lp_.rows[r]) capsum += caps_[j];
      width = std::max(width, std::min(budget, capsum) / demand_[r]);
    }
    const double eta = inner / 2;
    const std::uint64_t planned = static_cast<std::uint64_t>(
        std::ceil(4 * width * std::log(static_cast<double>(m_) + 1) / (inner * inner)));
    const std::uint64_t limit = std::min<std::uint64_t>(planned, kMaxIterations);

    std::uint64_t t = 0;
    while (t < limit) {
      ++t;
      ++stats.mw_iterations;
      double total = 0;
      for (double v : p) total += v;
      for (std::size_t j = 0; j < k_; ++j) {
        double s = 0;
        for (std::size_t r : col_rows_[j]) s += p[r] / demand_[r];
        score[j] = s / total;
      }
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return score[x] > score[y] || (score[x] == score[y] && x < y);
      });
      double left = budget;
      double value = 0;
      for (std::size_t j : order) {
        d[j] = std::min(caps_[j], left);
        left -= d[j];
        value += score[j] * d[j];
      }
      if (value < 1 - 1e-12) {
        res.infeasible = true;
        res.lagrangian_bound = lagrangian_bound(p);
        return res;
      }
      for (std::size_t j = 0; j < k_; ++j) sum[j] += d[j];
      double max_log = -INFINITY;
      std::vector<double> logs(m_);
      for (std::size_t r = 0; r < m_; ++r) {
        double covered = 0;
        for (std::size_t j : lp_.rows[r]) covered += d[j];
        logs[r] = std::log(p[r]) - eta * covered / demand_[r] / width;
        max_log = std::max(max_log, logs[r]);
      }
      for (std::size_t r = 0; r < m_; ++r) p[r] = std::exp(logs[r] - max_log);

      // Stop as soon as the running average covers every row to 1 - inner.
      if ((t & 63) == 0 || t == limit) {
        double worst = INFINITY;
        for (std::size_t r = 0; r < m_; ++r) {
          double covered = 0;
          for (std::size_t j : lp_.rows[r]) covered += sum[j];
          worst = std::min(worst, covered / static_cast<double>(t) / demand_[r]);
        }
        if (worst >= 1 - inner) break;
      }
    }
    res.lagrangian_bound = lagrangian_bound(p);
    res.average.resize(k_);
    for (std::size_t j = 0; j < k_; ++j) res.average[j] = sum[j] / static_cast<double>(t);
    return res;
  }

  std::vector<Rational> to_rational(const std::vector<double>& v) const {
    std::vector<Rational> out(k_);
    for (std::size_t j = 0; j < k_; ++j) {
      out[j] = Rational(v[j]);
      if (out[j] < 0) out[j] = 0;
      if (out[j] > lp_.caps[j]) out[j] = lp_.caps[j];
    }
    return out;
  }

  // Makes d exactly feasible: scale up by the worst coverage ratio (clipped
  // to caps), then fill what is still missing row by row, most violated
  // first.
  std::vector<Rational> repair(std::vector<Rational> d) const {
    Rational worst = 1;
    for (std::size_t r = 0; r < m_; ++r) {
      Rational covered = 0;
      for (std::size_t j : lp_.rows[r]) covered += d[j];
      Rational ratio = covered / lp_.demand[r];
      if (ratio < worst) worst = ratio;
    }
    if (worst > 0 && worst < 1) {
      for (std::size_t j = 0; j < k_; ++j) {
        d[j] /= worst;
        if (d[j] > lp_.caps[j]) d[j] = lp_.caps[j];
      }
    }
    while (auto r = most_violated_constraint(lp_, d)) {
      Rational missing = lp_.demand[*r];
      for (std::size_t j : lp_.rows[*r]) missing -= d[j];
      // Prefer columns shared with more uncovered rows.
      std::vector<std::size_t> cols = lp_.rows[*r];
      std::vector<std::size_t> shared(k_, 0);
      for (std::size_t j : cols) {
        for (std::size_t other : col_rows_[j]) {
          Rational c = 0;
          for (std::size_t i : lp_.rows[other]) c += d[i];
          if (c < lp_.demand[other]) ++shared[j];
        }
      }
      std::stable_sort(cols.begin(), cols.end(),
                       [&](std::size_t x, std::size_t y) { return shared[x] > shared[y]; });
      for (std::size_t j : cols) {
        if (missing <= 0) break;
        Rational spare = lp_.caps[j] - d[j];
        if (spare <= 0) continue;
        Rational add = spare < missing ? spare : missing;
        d[j] += add;
        missing -= add;
      }
      if (missing > 0) throw InfeasibleError("covering row cannot be satisfied within caps");
    }
    return d;
  }

  Rational cost(const std::vector<Rational>& d) const {
    Rational c = 0;
    for (const Rational& v : d) c += v;
    return c;
  }

  const CoveringLP& lp_;
  double eps_;
  std::size_t k_ = 0;
  std::size_t m_ = 0;
  std::vector<double> caps_;
  std::vector<double> demand_;
  std::vector<std::vector<std::size_t>> col_rows_;
  std::vector<Rational> best_;
  Rational best_cost_;
};

}  // namespace detail

inline std::vector<Rational> solve_covering_mw(const CoveringLP& lp, const Rational& eps,
                                               CoveringStats* stats = nullptr) {
  if (eps <= 0 || eps > 1) throw std::invalid_argument("solve_covering_mw: eps must be in (0, 1]");
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    Rational capsum = 0;
    for (std::size_t j : lp.rows[r]) capsum += lp.caps[j];
    if (capsum < lp.demand[r]) {
      throw InfeasibleError("covering row " + std::to_string(r) + " exceeds the caps of its columns");
    }
  }
  CoveringStats local;
  CoveringStats& st = stats ? *stats : local;
  if (lp.rows.empty()) return std::vector<Rational>(lp.columns.size(), Rational(0));
  detail::CoveringSolver solver(lp, eps.get_d());
  return solver.solve(st);
}

// x_u = a_u - d_u on the bottom layer, x = a elsewhere.
inline SolveReport lift_solution(const Instance& inst, const CoveringLP& lp,
                                 const std::vector<Rational>& d) {
  if (d.size() != lp.columns.size()) throw std::invalid_argument("d length mismatch");
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d[j] < 0 || d[j] > lp.caps[j]) throw std::invalid_argument("d violates a box constraint");
  }
  if (most_violated_constraint(lp, d)) throw std::invalid_argument("d violates a covering row");
  SolveReport report{inst.a(), 0, {}};
  for (std::size_t j = 0; j < d.size(); ++j) report.x[lp.columns[j]] -= d[j];
  if (!is_feasible(inst, report.x)) throw InvariantError("lifted assignment is infeasible");
  report.objective_value = objective(inst, report.x, Norm::kL1);
  return report;
}

// reduce -> solve_covering_mw -> lift.
inline SolveReport solve_bilayer_l1(const Instance& inst, const Rational& eps,
                                    CoveringStats* stats = nullptr) {
  CoveringLP lp = reduce_bilayer(inst);
  return lift_solution(inst, lp, solve_covering_mw(lp, eps, stats));
}

}  // namespace hiersmooth

#endif  // HIERSMOOTH_BILAYER_HPP_
