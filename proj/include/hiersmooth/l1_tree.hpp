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

// Exact l1 smoothing on rooted trees.
//
// Both solvers visit the tree in post-order. Each node v starts at
// max(a_v, sum of its children) and then surplus is pushed down a path from
// v: every node on the path drops by the same amount and the last node
// absorbs it in its slack (x_u - sum of children). A push pays off when the
// path has more nodes above target than at-or-below target.
//
//  * solve_l1_abstract applies one explicit push path at a time.
//  * solve_l1_dfs pushes along all paths of T_v in one depth-first search,
//    O(|T_v|) per node and O(n^2) overall. It also handles integer weights.

#ifndef HIERSMOOTH_L1_TREE_HPP_
#define HIERSMOOTH_L1_TREE_HPP_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hiersmooth/instance.hpp"
#include "hiersmooth/rational.hpp"

namespace hiersmooth {

// A broken solver invariant (negative value, violated sum constraint,
// push that does not pay exactly its amount). Never recoverable.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Search state for the path from the active root down to a node.
struct PathParams {
  // (weighted) count of nodes above target minus those at or below it.
  std::int64_t delta = 0;
  // Largest amount that can be pushed along the path without an improving
  // node reaching its target or any node going negative.
  Rational eps;
};

struct PushStats {
  std::uint64_t pushes = 0;
  Rational total_pushed = 0;
  std::uint64_t dfs_visits = 0;
};

struct SolveReport {
  Assignment x;
  Rational objective_value;
  PushStats stats;
};

// One committed push, reported with the assignment just before and just
// after it. `delta` and `gain` use weights when the solve is weighted.
struct PushEvent {
  NodeId active_root;
  std::vector<NodeId> path;  // top to bottom
  Rational amount;
  std::int64_t delta;
  Rational gain;
  const Assignment& before;
  const Assignment& after;
};

using PushObserver = std::function<void(const PushEvent&)>;

struct SolveOptions {
  // Called on every push. Building the snapshots costs O(n) per push, so
  // leave empty outside of tests and debugging.
  PushObserver observer;
};

inline PathParams set_params(const Rational& x_i, const Rational& a_i, Weight w_i,
                             std::int64_t delta_in, const Capacity& eps_in) {
  if (x_i > a_i) return {delta_in + w_i, eps_in.min_with(Rational(x_i - a_i))};
  return {delta_in - w_i, eps_in.min_with(x_i)};
}

struct PushPathResult {
  Assignment x;
  Rational gain;
};

// Decreases the first node of `path` by eps and cascades any resulting
// deficit down the path. gain = old - new of sum |x_j - a_j| over the path.
inline PushPathResult push_path(const Instance& inst, const Assignment& x,
                                const std::vector<NodeId>& path, const Rational& eps) {
  if (x.size() != inst.size()) throw std::invalid_argument("assignment length mismatch");
  if (path.empty()) throw std::invalid_argument("push_path: empty path");
  if (eps < 0) throw std::invalid_argument("push_path: negative eps");
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= inst.size()) throw std::invalid_argument("push_path: unknown node");
    if (i > 0) {
      auto parents = inst.parents(path[i]);
      if (parents.size() != 1 || parents[0] != path[i - 1]) {
        throw std::invalid_argument("push_path: not a downward path");
      }
    }
  }
  auto path_cost = [&](const Assignment& y) {
    Rational c = 0;
    for (NodeId j : path) c += abs(Rational(y[j] - inst.a(j)));
    return c;
  };

  PushPathResult result{x, 0};
  Assignment& y = result.x;
  const Rational old_cost = path_cost(y);
  y[path[0]] -= eps;
  for (std::size_t i = 1; i < path.size(); ++i) {
    Rational deficit = children_sum(inst, y, path[i - 1]) - y[path[i - 1]];
    if (deficit > 0) y[path[i]] -= deficit;
  }
  for (NodeId j : path) {
    if (y[j] < 0) throw std::invalid_argument("push_path: eps drives a value below zero");
  }
  result.gain = old_cost - path_cost(y);
  return result;
}

namespace detail {

inline Rational weighted_cost(const Instance& inst, const Assignment& x, bool weighted) {
  Rational c = 0;
  for (NodeId i = 0; i < inst.size(); ++i) {
    Rational dev = abs(Rational(x[i] - inst.a(i)));
    c += weighted ? Rational(dev * inst.weight(i)) : dev;
  }
  return c;
}

inline void require_tree(const ShapeReport& report) {
  if (!report.is_tree) {
    throw ShapeError(std::string("l1 tree solver needs a rooted tree, got ") +
                     std::string(to_string(report.kind)));
  }
}

// Algorithm-1 style improvement: find one push path, apply it, repeat.
class AbstractSolver {
 public:
  AbstractSolver(const Instance& inst, Assignment x, const SolveOptions& options)
      : inst_(inst), x_(std::move(x)), options_(options) {}

  void improve_subtree(NodeId v) {
    std::vector<NodeId> path;
    Rational amount;
    while (find_push_path(v, path, amount)) {
      PushPathResult pushed = push_path(inst_, x_, path, amount);
      if (pushed.gain != amount) {
        throw InvariantError("push at node " + std::to_string(v) + " gained " +
                             to_string(pushed.gain) + " instead of " + to_string(amount));
      }
      // Only path nodes move; ancestors of v are not set yet.
      for (NodeId j : path) {
        if (pushed.x[j] < 0 || pushed.x[j] < children_sum(inst_, pushed.x, j)) {
          throw InvariantError("push broke feasibility at node " + std::to_string(j));
        }
      }
      if (pushed.x[v] < inst_.a(v)) throw InvariantError("active root fell below its target");
      ++stats_.pushes;
      stats_.total_pushed += amount;
      if (options_.observer) {
        options_.observer(PushEvent{v, path, amount, delta_, pushed.gain, x_, pushed.x});
      }
      x_ = std::move(pushed.x);
    }
  }

  Assignment& x() { return x_; }
  PushStats& stats() { return stats_; }

 private:
  struct Frame {
    NodeId node;
    PathParams params;
    std::size_t next_child = 0;
  };

  // DFS from v in ascending child order. A path may only continue through
  // nodes without slack; the first slack node ends it. Accepts the first
  // terminal with positive balance.
  bool find_push_path(NodeId v, std::vector<NodeId>& path, Rational& amount) {
    std::vector<Frame> stack;
    auto enter = [&](NodeId u, std::int64_t delta, const Capacity& eps) -> bool {
      ++stats_.dfs_visits;
      PathParams p = set_params(x_[u], inst_.a(u), 1, delta, eps);
      if (p.eps == 0) return false;
      Rational slack = x_[u] - children_sum(inst_, x_, u);
      if (slack > 0) {
        if (p.delta > 0) {
          path.clear();
          for (const Frame& f : stack) path.push_back(f.node);
          path.push_back(u);
          amount = slack < p.eps ? slack : p.eps;
          delta_ = p.delta;
          return true;
        }
        return false;
      }
      stack.push_back({u, std::move(p)});
      return false;
    };

    if (enter(v, 0, Capacity::unbounded())) return true;
    while (!stack.empty()) {
      Frame& top = stack.back();
      auto kids = inst_.children(top.node);
      if (top.next_child == kids.size()) {
        stack.pop_back();
        continue;
      }
      NodeId c = kids[top.next_child++];
      std::int64_t delta = top.params.delta;
      Capacity eps = Capacity::finite(top.params.eps);
      if (enter(c, delta, eps)) return true;
    }
    return false;
  }

  const Instance& inst_;
  Assignment x_;
  const SolveOptions& options_;
  PushStats stats_;
  std::int64_t delta_ = 0;
};

// Algorithm-2 style push search with an explicit stack. Frames are reused
// across calls so the rationals inside them keep their storage; the hot loop
// does no allocation once the stack has reached the tree height.
class DfsSolver {
 public:
  DfsSolver(const Instance& inst, Assignment x, bool weighted, const SolveOptions& options)
      : inst_(inst), x_(std::move(x)), weighted_(weighted), options_(options) {}

  // Returns the total decrease of x_u during the call. Values of u and of
  // everything below it are already updated; the caller still has to lower
  // its own ancestors of u by the returned amount.
  Rational push_search(NodeId u, const Capacity& eps, std::int64_t delta) {
    active_root_ = u;
    depth_ = 0;
    reserve_frame();
    enter(u, eps.is_unbounded() ? nullptr : &eps.value(), delta);
    while (true) {
      // Grow first: enter() reads the parent's eps through a reference.
      reserve_frame();
      Frame& top = stack_[depth_ - 1];
      auto kids = inst_.children(top.node);
      if (sgn(top.eps) == 0 || top.next_child == kids.size()) {
        check_node(top.node);
        if (--depth_ == 0) return top.sum;
        Frame& parent = stack_[depth_ - 1];
        if (sgn(top.sum) > 0) {
          Rational& xp = x_[parent.node];
          xp -= top.sum;
          parent.sum += top.sum;
          parent.eps -= top.sum;
          if (sgn(xp) < 0) throw InvariantError("push search drove a value negative");
        }
        continue;
      }
      NodeId c = kids[top.next_child++];
      enter(c, &top.eps, top.delta);
    }
  }

  Assignment& x() { return x_; }
  PushStats& stats() { return stats_; }

 private:
  struct Frame {
    NodeId node = 0;
    std::int64_t delta = 0;
    Rational eps;  // remaining capacity through this node
    Rational sum;  // amount this node has been lowered so far
    std::size_t next_child = 0;
  };

  Weight weight(NodeId i) const { return weighted_ ? inst_.weight(i) : 1; }

  void reserve_frame() {
    if (depth_ == stack_.size()) stack_.emplace_back();
  }

  // set_params inlined on reused storage; eps_in == nullptr is unbounded.
  void enter(NodeId u, const Rational* eps_in, std::int64_t delta_in) {
    ++stats_.dfs_visits;
    Frame& f = stack_[depth_++];
    f.node = u;
    f.next_child = 0;
    f.sum = 0;
    const Rational& xu = x_[u];
    if (xu > inst_.a(u)) {
      f.delta = delta_in + weight(u);
      f.eps = xu - inst_.a(u);
    } else {
      f.delta = delta_in - weight(u);
      f.eps = xu;
    }
    if (eps_in != nullptr && *eps_in < f.eps) f.eps = *eps_in;
    if (sgn(f.eps) == 0 || f.delta <= 0) return;
    slack_into(u, scratch_);
    if (sgn(scratch_) <= 0) return;
    if (f.eps < scratch_) scratch_ = f.eps;
    if (options_.observer) notify(scratch_);
    x_[u] -= scratch_;
    f.sum += scratch_;
    f.eps -= scratch_;
    ++stats_.pushes;
    stats_.total_pushed += scratch_;
  }

  void slack_into(NodeId u, Rational& out) const {
    out = x_[u];
    for (NodeId c : inst_.children(u)) out -= x_[c];
  }

  void check_node(NodeId u) {
    if (sgn(x_[u]) < 0) throw InvariantError("negative value at node " + std::to_string(u));
    slack_into(u, scratch_);
    if (sgn(scratch_) < 0) {
      throw InvariantError("sum constraint violated at node " + std::to_string(u));
    }
  }

  // Ancestors on the stack have not yet been lowered by what was pushed
  // below them; reconstruct the true current values before reporting.
  void notify(const Rational& take) {
    Assignment before = x_;
    std::vector<NodeId> path(depth_);
    Rational pending = 0;
    for (std::size_t k = depth_; k-- > 0;) {
      path[k] = stack_[k].node;
      before[stack_[k].node] -= pending;
      pending += stack_[k].sum;
    }
    Assignment after = before;
    for (NodeId j : path) after[j] -= take;
    Rational gain = weighted_cost(inst_, before, weighted_) - weighted_cost(inst_, after, weighted_);
    options_.observer(
        PushEvent{active_root_, path, take, stack_[depth_ - 1].delta, gain, before, after});
  }

  const Instance& inst_;
  Assignment x_;
  bool weighted_;
  const SolveOptions& options_;
  PushStats stats_;
  std::vector<Frame> stack_;
  std::size_t depth_ = 0;
  Rational scratch_;
  NodeId active_root_ = 0;
};

}  // namespace detail

// Runs the single-path improvement loop at v until no paying push path from v
// remains. Assumes the subtrees of v's children are already optimal.
inline Assignment improve_subtree_abstract(const Instance& inst, const Assignment& x, NodeId v) {
  if (x.size() != inst.size()) throw std::invalid_argument("assignment length mismatch");
  SolveOptions options;
  detail::AbstractSolver solver(inst, x, options);
  solver.improve_subtree(v);
  return std::move(solver.x());
}

inline SolveReport solve_l1_abstract(const Instance& inst, const SolveOptions& options = {}) {
  ShapeReport shape = validate(inst);
  detail::require_tree(shape);
  detail::AbstractSolver solver(inst, Assignment(inst.size(), Rational(0)), options);
  for (NodeId v : shape.post_order) {
    Rational s = children_sum(inst, solver.x(), v);
    solver.x()[v] = s > inst.a(v) ? s : inst.a(v);
    solver.improve_subtree(v);
  }
  SolveReport report{std::move(solver.x()), 0, std::move(solver.stats())};
  report.objective_value = objective(inst, report.x, Norm::kL1);
  return report;
}

struct PushSearchResult {
  Assignment x;
  Rational pushed;
};

// One push search from u with incoming capacity eps and balance delta. Only
// u's subtree is modified; ancestors of u are left for the caller.
inline PushSearchResult push_search(const Instance& inst, const Assignment& x, NodeId u,
                                    const Capacity& eps, std::int64_t delta,
                                    bool weighted = false) {
  if (x.size() != inst.size()) throw std::invalid_argument("assignment length mismatch");
  if (u >= inst.size()) throw std::invalid_argument("push_search: unknown node");
  if (weighted && !inst.has_weights()) throw std::invalid_argument("instance has no weights");
  detail::require_tree(validate(inst));
  SolveOptions options;
  detail::DfsSolver solver(inst, x, weighted, options);
  Rational pushed = solver.push_search(u, eps, delta);
  return {std::move(solver.x()), std::move(pushed)};
}

// ---------------------------------------------------------------------------
// Weighted -> unweighted chain expansion.

struct ExpandedInstance {
  Instance tree;
  // chains[i] lists the expanded ids of original node i, bottom (i_1) first.
  std::vector<std::vector<NodeId>> chains;
  // origin[j] is the original node an expanded node belongs to.
  std::vector<NodeId> origin;
};

inline constexpr std::uint64_t kDefaultExpansionCap = 1'000'000;

// Replaces node i by a chain i_1 -> ... -> i_{w_i}, each with target a_i.
// Children of i hang below i_1 and the top i_{w_i} points to the first chain
// node of i's parent.
inline ExpandedInstance expand_weighted(const Instance& inst,
                                        std::uint64_t cap = kDefaultExpansionCap) {
  if (!inst.has_weights()) throw std::invalid_argument("expand_weighted: instance has no weights");
  std::uint64_t total = 0;
  for (NodeId i = 0; i < inst.size(); ++i) {
    total += static_cast<std::uint64_t>(inst.weight(i));
    if (total > cap) {
      throw std::length_error("expand_weighted: expansion exceeds cap of " + std::to_string(cap) +
                              " nodes");
    }
  }
  std::vector<std::vector<NodeId>> chains(inst.size());
  std::vector<NodeId> origin;
  std::vector<Rational> a;
  std::vector<Edge> edges;
  origin.reserve(total);
  a.reserve(total);
  for (NodeId i = 0; i < inst.size(); ++i) {
    for (Weight k = 0; k < inst.weight(i); ++k) {
      NodeId id = origin.size();
      if (k > 0) edges.push_back({id - 1, id});
      chains[i].push_back(id);
      origin.push_back(i);
      a.push_back(inst.a(i));
    }
  }
  for (const Edge& e : inst.edges()) edges.push_back({chains[e.child].back(), chains[e.parent].front()});
  return {Instance(std::move(a), std::move(edges)), std::move(chains), std::move(origin)};
}


namespace detail {

inline SolveReport solve_l1_dfs_unit(const Instance& inst, const SolveOptions& options) {
  ShapeReport shape = validate(inst);
  require_tree(shape);
  DfsSolver solver(inst, Assignment(inst.size(), Rational(0)), false, options);
  Assignment& x = solver.x();
  for (NodeId v : shape.post_order) {
    Rational s = children_sum(inst, x, v);
    x[v] = s > inst.a(v) ? s : inst.a(v);
    // x_v == a_v means T_v is already optimal.
    if (x[v] > inst.a(v)) solver.push_search(v, Capacity::unbounded(), 0);
  }
  SolveReport report{std::move(x), 0, std::move(solver.stats())};
  report.objective_value = objective(inst, report.x, Norm::kL1);
  return report;
}

}  // namespace detail

// Maps an assignment of the expanded tree back to the original nodes. Chain
// values rise from bottom to top, and clamping a_i into [bottom, top] keeps
// every sum constraint while never costing more than the whole chain did.
inline Assignment collapse_chains(const Instance& inst, const ExpandedInstance& expanded,
                                  const Assignment& x_expanded) {
  if (x_expanded.size() != expanded.tree.size()) {
    throw std::invalid_argument("collapse_chains: assignment length mismatch");
  }
  Assignment x(inst.size());
  for (NodeId i = 0; i < inst.size(); ++i) {
    const Rational& lo = x_expanded[expanded.chains[i].front()];
    const Rational& hi = x_expanded[expanded.chains[i].back()];
    const Rational& a = inst.a(i);
    x[i] = a < lo ? lo : (a > hi ? hi : a);
  }
  return x;
}

// Weighted mode solves the chain expansion and collapses it; the observer
// and stats then refer to expanded node ids. Committing to the first
// positive-balance path with weighted balances is not optimal in general
// (root a=2 w=3 over leaves a=2 w=2 and a=3 w=1 ends at 5, optimum 3).
inline SolveReport solve_l1_dfs(const Instance& inst, bool weighted = false,
                                const SolveOptions& options = {},
                                std::uint64_t expansion_cap = kDefaultExpansionCap) {
  if (!weighted) return detail::solve_l1_dfs_unit(inst, options);
  if (!inst.has_weights()) {
    throw std::invalid_argument("weighted solve requested on an unweighted instance");
  }
  detail::require_tree(validate(inst));
  ExpandedInstance expanded = expand_weighted(inst, expansion_cap);
  SolveReport inner = detail::solve_l1_dfs_unit(expanded.tree, options);
  SolveReport report{collapse_chains(inst, expanded, inner.x), 0, std::move(inner.stats)};
  report.objective_value = objective(inst, report.x, Norm::kL1, true);
  return report;
}

}  // namespace hiersmooth

#endif  // HIERSMOOTH_L1_TREE_HPP_
