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

#ifndef HIERSMOOTH_LINF_DAG_HPP_
#define HIERSMOOTH_LINF_DAG_HPP_

#include <stdexcept>
#include <utility>

#include "hiersmooth/instance.hpp"
#include "hiersmooth/rational.hpp"

namespace hiersmooth {

struct ThresholdResult {
  Rational t;
  // Pointwise-smallest feasible assignment with x_i >= a_i - t.
  Assignment x_min;
  // max_i |x_min_i - a_i| <= t
  bool feasible_at_t = false;
};

inline ThresholdResult assign_for_threshold(const Instance& inst, const Rational& t) {
  if (t < 0) throw std::invalid_argument("assign_for_threshold: negative threshold");
  ThresholdResult result{t, Assignment(inst.size(), Rational(0)), true};
  Assignment& x = result.x_min;
  for (NodeId i : inst.topo_order()) {
    Rational v = children_sum(inst, x, i);
    Rational lower = inst.a(i) - t;
    if (lower > v) v = std::move(lower);
    if (v < 0) v = 0;
    x[i] = std::move(v);
    if (x[i] - inst.a(i) > t) result.feasible_at_t = false;
  }
  return result;
}

struct LinfResult {
  Rational t_star;
  Assignment x;
  // max_i |x_i - a_i|, never above t_star.
  Rational objective_value;
};

inline Rational default_linf_tolerance(const Instance& inst) {
  Rational total = 0;
  for (const Rational& v : inst.a()) total += v;
  Rational tol = total / Rational(mpz_class(1) << 40);
  return tol > 0 ? tol : Rational(1, 1 << 20);
}

// Bisection over [0, sum a_i] with dyadic midpoints; stops once the bracket
// is no wider than tol and returns its feasible (upper) end.
inline LinfResult solve_linf(const Instance& inst, const Rational& tol) {
  if (tol <= 0) throw std::invalid_argument("solve_linf: tolerance must be positive");
  ThresholdResult best = assign_for_threshold(inst, 0);
  if (!best.feasible_at_t) {
    Rational lo = 0;
    Rational hi = 0;
    for (const Rational& v : inst.a()) hi += v;
    best = assign_for_threshold(inst, hi);
    while (hi - lo > tol) {
      Rational mid = (lo + hi) / 2;
      ThresholdResult probe = assign_for_threshold(inst, mid);
      if (probe.feasible_at_t) {
        hi = std::move(mid);
        best = std::move(probe);
      } else {
        lo = std::move(mid);
      }
    }
  }
  LinfResult result{best.t, std::move(best.x_min), 0};
  result.objective_value = objective(inst, result.x, Norm::kLinf);
  return result;
}

}  // namespace hiersmooth

#endif  // HIERSMOOTH_LINF_DAG_HPP_
