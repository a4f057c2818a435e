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

// Dense two-phase primal simplex over exact rationals with Bland's rule.
// Meant for verification at desk scale (a few hundred rows), not speed.

#ifndef HIERSMOOTH_SIMPLEX_HPP_
#define HIERSMOOTH_SIMPLEX_HPP_

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hiersmooth/rational.hpp"

namespace hiersmooth {

enum class Relation { kGreaterEqual, kLessEqual, kEqual };

struct LinearTerm {
  std::size_t var;
  Rational coef;
};

struct LPConstraint {
  std::vector<LinearTerm> terms;
  Relation relation;
  Rational rhs;
};

// minimize objective . x subject to constraints. nonnegative[j] == false
// makes x_j free; an empty vector means every variable is non-negative.
struct LPProblem {
  std::size_t num_vars = 0;
  std::vector<Rational> objective;
  std::vector<LPConstraint> constraints;
  std::vector<bool> nonnegative;
};

enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

struct LPSolution {
  LPStatus status = LPStatus::kInfeasible;
  Rational objective;
  std::vector<Rational> x;
  // One multiplier per constraint: >= 0 for '>=' rows, <= 0 for '<=' rows,
  // so that objective == sum duals[k] * rhs[k] at optimality.
  std::vector<Rational> duals;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows, std::vector<Rational>(cols + 1)), basis_(rows) {}

  Rational& at(std::size_t r, std::size_t c) { return data_[r][c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return data_[r][c]; }
  Rational& rhs(std::size_t r) { return data_[r][cols_]; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    std::vector<Rational>& prow = data_[pr];
    const Rational inv = 1 / prow[pc];
    for (auto& v : prow) {
      if (sgn(v) != 0) v *= inv;
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr || sgn(data_[r][pc]) == 0) continue;
      const Rational factor = data_[r][pc];
      std::vector<Rational>& row = data_[r];
      for (std::size_t c = 0; c <= cols_; ++c) {
        if (sgn(prow[c]) != 0) row[c] -= factor * prow[c];
      }
    }
    basis_[pr] = pc;
  }

  // Bland's rule on cost vector `cost`; columns with eligible[c] == false
  // never enter. Returns false when unbounded.
  bool run(const std::vector<Rational>& cost, const std::vector<bool>& eligible) {
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_ && enter == cols_; ++c) {
        if (!eligible[c]) continue;
        Rational reduced = cost[c];
        for (std::size_t r = 0; r < rows_; ++r) {
          if (sgn(data_[r][c]) != 0 && sgn(cost[basis_[r]]) != 0) {
            reduced -= cost[basis_[r]] * data_[r][c];
          }
        }
        if (reduced < 0) enter = c;
      }
      if (enter == cols_) return true;

      std::size_t leave = rows_;
      Rational best_ratio;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (sgn(data_[r][enter]) <= 0) continue;
        Rational ratio = data_[r][cols_] / data_[r][enter];
        if (leave == rows_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = std::move(ratio);
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<Rational>> data_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

inline LPSolution solve_lp(const LPProblem& problem) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.constraints.size();
  if (problem.objective.size() != n) throw std::invalid_argument("solve_lp: objective length mismatch");
  std::vector<bool> nonneg = problem.nonnegative;
  if (nonneg.empty()) nonneg.assign(n, true);
  if (nonneg.size() != n) throw std::invalid_argument("solve_lp: nonnegative flag length mismatch");

  // Structural columns: one per variable, plus a negative copy for free ones.
  std::vector<std::size_t> neg_col(n, std::numeric_limits<std::size_t>::max());
  std::size_t structural = n;
  for (std::size_t j = 0; j < n; ++j) {
    if (!nonneg[j]) neg_col[j] = structural++;
  }
  std::vector<std::size_t> slack_col(m, std::numeric_limits<std::size_t>::max());
  std::size_t cols = structural;
  for (std::size_t k = 0; k < m; ++k) {
    if (problem.constraints[k].relation != Relation::kEqual) slack_col[k] = cols++;
  }
  const std::size_t art_begin = cols;
  cols += m;

  detail::Tableau tab(m, cols);
  std::vector<int> row_sign(m, 1);
  for (std::size_t k = 0; k < m; ++k) {
    const LPConstraint& con = problem.constraints[k];
    for (const LinearTerm& t : con.terms) {
      if (t.var >= n) throw std::invalid_argument("solve_lp: constraint references unknown variable");
      tab.at(k, t.var) += t.coef;
      if (!nonneg[t.var]) tab.at(k, neg_col[t.var]) -= t.coef;
    }
    if (con.relation == Relation::kGreaterEqual) tab.at(k, slack_col[k]) = -1;
    if (con.relation == Relation::kLessEqual) tab.at(k, slack_col[k]) = 1;
    tab.rhs(k) = con.rhs;
    if (con.rhs < 0) {
      row_sign[k] = -1;
      for (std::size_t c = 0; c <= cols; ++c) tab.at(k, c) = -tab.at(k, c);
    }
    tab.at(k, art_begin + k) = 1;
    tab.basis(k) = art_begin + k;
  }

  LPSolution sol;
  // Phase 1: drive the artificials to zero.
  std::vector<Rational> phase1(cols, Rational(0));
  for (std::size_t k = 0; k < m; ++k) phase1[art_begin + k] = 1;
  std::vector<bool> eligible(cols, true);
  tab.run(phase1, eligible);
  Rational infeasibility = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis(r) >= art_begin) infeasibility += tab.rhs(r);
  }
  if (infeasibility > 0) {
    sol.status = LPStatus::kInfeasible;
    return sol;
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis(r) < art_begin) continue;
    for (std::size_t c = 0; c < art_begin; ++c) {
      if (sgn(tab.at(r, c)) != 0) {
        tab.pivot(r, c);
        break;
      }
    }
    // A row with no non-artificial entry is redundant; its artificial stays
    // basic at zero and can never move.
  }

  // Phase 2.
  std::vector<Rational> cost(cols, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = problem.objective[j];
    if (!nonneg[j]) cost[neg_col[j]] = -problem.objective[j];
  }
  for (std::size_t c = art_begin; c < cols; ++c) eligible[c] = false;
  if (!tab.run(cost, eligible)) {
    sol.status = LPStatus::kUnbounded;
    return sol;
  }

  std::vector<Rational> column_value(cols, Rational(0));
  for (std::size_t r = 0; r < m; ++r) column_value[tab.basis(r)] = tab.rhs(r);
  sol.status = LPStatus::kOptimal;
  sol.x.assign(n, Rational(0));
  sol.objective = 0;
  for (std::size_t j = 0; j < n; ++j) {
    sol.x[j] = column_value[j];
    if (!nonneg[j]) sol.x[j] -= column_value[neg_col[j]];
    sol.objective += problem.objective[j] * sol.x[j];
  }
  // y = c_B B^-1; B^-1 sits in the artificial columns.
  sol.duals.assign(m, Rational(0));
  for (std::size_t k = 0; k < m; ++k) {
    Rational y = 0;
    for (std::size_t r = 0; r < m; ++r) {
      if (sgn(cost[tab.basis(r)]) != 0) y += cost[tab.basis(r)] * tab.at(r, art_begin + k);
    }
    sol.duals[k] = row_sign[k] > 0 ? y : Rational(-y);
  }
  return sol;
}

}  // namespace hiersmooth

#endif  // HIERSMOOTH_SIMPLEX_HPP_
