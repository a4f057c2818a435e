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

#include <cstdint>
#include <vector>

#include "gtest/gtest.h"
#include "hiersmooth/hiersmooth.hpp"

namespace hiersmooth {
namespace {

// Checks every committed push against the solver invariants. Only nodes in
// the active subtree are checked for feasibility: ancestors are still unset.
class PushAuditor {
 public:
  explicit PushAuditor(const Instance& inst, bool unit_balance = true)
      : inst_(inst), unit_balance_(unit_balance) {}

  SolveOptions options() {
    SolveOptions o;
    o.observer = [this](const PushEvent& e) { Check(e); };
    return o;
  }

  std::uint64_t pushes() const { return pushes_; }

 private:
  bool InSubtree(NodeId j, NodeId root) const {
    while (true) {
      if (j == root) return true;
      auto p = inst_.parents(j);
      if (p.empty()) return false;
      j = p[0];
    }
  }

  void Check(const PushEvent& e) {
    ++pushes_;
    ASSERT_FALSE(e.path.empty());
    EXPECT_EQ(e.path.front(), e.active_root);
    EXPECT_GT(e.amount, 0);
    EXPECT_EQ(e.gain, e.amount);
    if (unit_balance_) {
      std::int64_t balance = 0;
      for (NodeId j : e.path) balance += e.before[j] > inst_.a(j) ? 1 : -1;
      EXPECT_EQ(balance, 1);
      EXPECT_EQ(e.delta, 1);
    }
    for (NodeId j = 0; j < inst_.size(); ++j) {
      EXPECT_LE(e.after[j], e.before[j]) << "node " << j << " increased";
      if (!InSubtree(j, e.active_root)) continue;
      EXPECT_GE(e.after[j], 0);
      EXPECT_GE(e.after[j], children_sum(inst_, e.after, j)) << "node " << j;
    }
    EXPECT_GE(e.after[e.active_root], inst_.a(e.active_root));
    if (last_ && last_root_ == e.active_root) {
      for (NodeId j = 0; j < inst_.size(); ++j) EXPECT_LE(e.before[j], (*last_)[j]);
    }
    last_ = e.after;
    last_root_ = e.active_root;
  }

  const Instance& inst_;
  bool unit_balance_;
  std::uint64_t pushes_ = 0;
  std::optional<Assignment> last_;
  NodeId last_root_ = 0;
};

TEST(SetParamsTest, Examples) {
  PathParams p = set_params(7, 4, 1, 0, Capacity::unbounded());
  EXPECT_EQ(p.delta, 1);
  EXPECT_EQ(p.eps, 3);
  p = set_params(2, 5, 1, 1, Capacity::finite(10));
  EXPECT_EQ(p.delta, 0);
  EXPECT_EQ(p.eps, 2);
  p = set_params(9, 1, 4, -1, Capacity::finite(5));
  EXPECT_EQ(p.delta, 3);
  EXPECT_EQ(p.eps, 5);
}

TEST(SetParamsTest, AtTargetCountsAsWorsening) {
  PathParams p = set_params(5, 5, 1, 2, Capacity::unbounded());
  EXPECT_EQ(p.delta, 1);
  EXPECT_EQ(p.eps, 5);
  p = set_params(0, 0, 3, 0, Capacity::finite(4));
  EXPECT_EQ(p.delta, -3);
  EXPECT_EQ(p.eps, 0);
}

TEST(PushPathTest, FigureOneAfterInit) {
  Instance fig = figure1_instance();
  PushPathResult r = push_path(fig, {10, 10, 5, 5}, {0, 1, 2}, 2);
  EXPECT_EQ(r.x, (Assignment{8, 8, 3, 5}));
  EXPECT_EQ(r.gain, 2);
  EXPECT_EQ(objective(fig, r.x, Norm::kL1), 2);
}

TEST(PushPathTest, ZeroEpsIsANoOp) {
  Instance fig = figure1_instance();
  PushPathResult r = push_path(fig, {10, 10, 5, 5}, {0, 1, 3}, 0);
  EXPECT_EQ(r.x, (Assignment{10, 10, 5, 5}));
  EXPECT_EQ(r.gain, 0);
}

TEST(PushPathTest, SlackAbsorbsAboveIt) {
  Instance chain({8, 4}, {{1, 0}});
  PushPathResult r = push_path(chain, {10, 4}, {0}, 2);
  EXPECT_EQ(r.x, (Assignment{8, 4}));
  EXPECT_EQ(r.gain, 2);
  // Deeper path: the cascade stops where the slack covers it.
  r = push_path(chain, {10, 4}, {0, 1}, 6);
  EXPECT_EQ(r.x, (Assignment{4, 4}));
}

TEST(PushPathTest, Rejections) {
  Instance fig = figure1_instance();
  Assignment x{10, 10, 5, 5};
  EXPECT_THROW(push_path(fig, x, {0, 2}, 1), std::invalid_argument);
  EXPECT_THROW(push_path(fig, x, {2, 3}, 1), std::invalid_argument);
  EXPECT_THROW(push_path(fig, x, {}, 1), std::invalid_argument);
  EXPECT_THROW(push_path(fig, x, {0}, -1), std::invalid_argument);
  EXPECT_THROW(push_path(fig, x, {0, 1, 2}, 6), std::invalid_argument);
}

TEST(ImproveSubtreeTest, Examples) {
  Instance fig = figure1_instance();
  Assignment init{10, 10, 5, 5};
  EXPECT_EQ(improve_subtree_abstract(fig, init, 0), (Assignment{8, 8, 3, 5}));
  Assignment at_target{8, 10, 5, 5};
  EXPECT_EQ(improve_subtree_abstract(fig, {10, 8, 4, 4}, 1), (Assignment{10, 8, 4, 4}));
  EXPECT_EQ(improve_subtree_abstract(fig, init, 2), init);
  EXPECT_EQ(improve_subtree_abstract(fig, at_target, 3), at_target);
}

TEST(AbstractSolverTest, Examples) {
  EXPECT_EQ(solve_l1_abstract(figure1_instance()).objective_value, 2);
  Instance chain({9, 4, 1}, {{1, 0}, {2, 1}});
  SolveReport r = solve_l1_abstract(chain);
  EXPECT_EQ(r.x, chain.a());
  EXPECT_EQ(r.objective_value, 0);
  EXPECT_EQ(solve_l1_abstract(Instance({3, 7}, {{1, 0}})).objective_value, 4);
}

TEST(AbstractSolverTest, RejectsNonTrees) {
  Instance dag({5, 4, 3}, {{2, 0}, {2, 1}, {1, 0}});
  EXPECT_THROW(solve_l1_abstract(dag), ShapeError);
  EXPECT_THROW(solve_l1_dfs(dag), ShapeError);
  Instance forest({1, 1}, {});
  EXPECT_THROW(solve_l1_dfs(forest), ShapeError);
}

TEST(PushSearchTest, FigureOneRoot) {
  Instance fig = figure1_instance();
  PushSearchResult r = push_search(fig, {10, 10, 5, 5}, 0, Capacity::unbounded(), 0);
  EXPECT_EQ(r.pushed, 2);
  EXPECT_TRUE(is_feasible(fig, r.x));
  EXPECT_EQ(objective(fig, r.x, Norm::kL1), 2);
}

TEST(PushSearchTest, ZeroCapacityReturnsZero) {
  Instance fig = figure1_instance();
  Assignment x{10, 10, 5, 5};
  PushSearchResult r = push_search(fig, x, 1, Capacity::finite(0), 3);
  EXPECT_EQ(r.pushed, 0);
  EXPECT_EQ(r.x, x);
}

TEST(PushSearchTest, SlackBranch) {
  Instance two({3, 7}, {{1, 0}});
  PushSearchResult r = push_search(two, {7, 7}, 0, Capacity::unbounded(), 0);
  EXPECT_GE(r.pushed, 0);
  EXPECT_TRUE(is_feasible(two, r.x));
  EXPECT_EQ(objective(two, r.x, Norm::kL1), 4);
  EXPECT_EQ(objective(two, r.x, Norm::kL1), brute_force_integral(two, 10).objective_value);
}

TEST(DfsSolverTest, Examples) {
  EXPECT_EQ(solve_l1_dfs(figure1_instance()).objective_value, 2);
  Instance zeros({0, 0, 0, 0}, {{1, 0}, {2, 0}, {3, 2}});
  SolveReport r = solve_l1_dfs(zeros);
  EXPECT_EQ(r.x, Assignment(4, Rational(0)));
  EXPECT_EQ(r.objective_value, 0);
}

TEST(DfsSolverTest, MatchesExactLpAndAbstract) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Instance inst = gen_random_tree(1 + seed % 12, 10, seed);
    SolveReport dfs = solve_l1_dfs(inst);
    SolveReport abs = solve_l1_abstract(inst);
    Rational lp = solve_lp_exact(inst, Norm::kL1).objective_value;
    EXPECT_EQ(dfs.objective_value, lp) << "seed " << seed;
    EXPECT_EQ(abs.objective_value, lp) << "seed " << seed;
    EXPECT_TRUE(is_feasible(inst, dfs.x));
    EXPECT_TRUE(is_feasible(inst, abs.x));
    for (const Rational& v : dfs.x) EXPECT_TRUE(is_integral(v));
  }
}

TEST(DfsSolverTest, FractionalTargets) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Instance base = gen_random_tree(2 + seed % 8, 9, seed);
    std::vector<Rational> a = base.a();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] /= static_cast<long>(1 + (i + seed) % 3);
    Instance inst(a, base.edges());
    Rational lp = solve_lp_exact(inst, Norm::kL1).objective_value;
    EXPECT_EQ(solve_l1_dfs(inst).objective_value, lp);
    EXPECT_EQ(solve_l1_abstract(inst).objective_value, lp);
  }
}

TEST(DfsSolverTest, DeepPathUsesNoRecursion) {
  const std::size_t n = 100000;
  std::vector<Rational> a(n);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = i == 0 ? 0 : static_cast<long>(n - i);
    if (i > 0) edges.push_back({i, i - 1});
  }
  Instance path(std::move(a), std::move(edges));
  SolveReport r = solve_l1_dfs(path);
  EXPECT_TRUE(is_feasible(path, r.x));
  EXPECT_EQ(validate(path).post_order.size(), n);
}

TEST(InvariantTest, EveryCommittedPush) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    Instance inst = gen_random_tree(1 + seed % 12, 10, seed);
    PushAuditor dfs_audit(inst);
    solve_l1_dfs(inst, false, dfs_audit.options());
    PushAuditor abs_audit(inst);
    solve_l1_abstract(inst, abs_audit.options());
  }
  Instance fig = figure1_instance();
  PushAuditor audit(fig);
  solve_l1_abstract(fig, audit.options());
  EXPECT_EQ(audit.pushes(), 1u);
}

TEST(WeightedTest, CounterexampleForFirstPositivePath) {
  Instance inst({2, 2, 3}, {{1, 0}, {2, 0}}, std::vector<Weight>{3, 2, 1});
  EXPECT_EQ(solve_lp_exact(inst, Norm::kL1, true).objective_value, 3);
  // The literal weighted search commits to child 1 first and cannot undo it.
  PushSearchResult literal = push_search(inst, {5, 2, 3}, 0, Capacity::unbounded(), 0, true);
  EXPECT_EQ(objective(inst, literal.x, Norm::kL1, true), 5);
  SolveReport r = solve_l1_dfs(inst, true);
  EXPECT_EQ(r.objective_value, 3);
  EXPECT_EQ(r.x, (Assignment{2, 2, 0}));
}

TEST(WeightedTest, MatchesExactLp) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Instance inst = gen_random_tree(1 + seed % 12, 10, seed, true, 4);
    SolveReport r = solve_l1_dfs(inst, true);
    EXPECT_TRUE(is_feasible(inst, r.x));
    EXPECT_EQ(r.objective_value, solve_lp_exact(inst, Norm::kL1, true).objective_value)
        << "seed " << seed;
    EXPECT_EQ(r.objective_value, objective(inst, r.x, Norm::kL1, true));
    for (const Rational& v : r.x) EXPECT_TRUE(is_integral(v));
  }
  EXPECT_THROW(solve_l1_dfs(figure1_instance(), true), std::invalid_argument);
}

TEST(ExpandTest, UnitWeightsKeepTheTree) {
  Instance inst = gen_random_tree(9, 6, 3, true, 1);
  ExpandedInstance ex = expand_weighted(inst);
  EXPECT_EQ(ex.tree.size(), inst.size());
  EXPECT_EQ(serialize_instance(ex.tree), serialize_instance(Instance(inst.a(), inst.edges())));
}

TEST(ExpandTest, SingleNodeChain) {
  ExpandedInstance ex = expand_weighted(Instance({5}, {}, std::vector<Weight>{3}));
  ASSERT_EQ(ex.tree.size(), 3u);
  for (NodeId j = 0; j < 3; ++j) EXPECT_EQ(ex.tree.a(j), 5);
  EXPECT_EQ(ex.chains[0], (std::vector<NodeId>{0, 1, 2}));
  EXPECT_TRUE(validate(ex.tree).is_tree);
  EXPECT_EQ(validate(ex.tree).root, NodeId{2});
}

TEST(ExpandTest, WeightedFigureOne) {
  Instance inst({8, 8, 5, 5}, {{1, 0}, {2, 1}, {3, 1}}, std::vector<Weight>{1, 2, 1, 1});
  ExpandedInstance ex = expand_weighted(inst);
  EXPECT_EQ(ex.tree.size(), 5u);
  EXPECT_EQ(ex.origin, (std::vector<NodeId>{0, 1, 1, 2, 3}));
  EXPECT_EQ(solve_l1_dfs(inst, true).objective_value, solve_l1_dfs(ex.tree).objective_value);
}

TEST(ExpandTest, CapAndPreconditions) {
  Instance inst({1, 1}, {{1, 0}}, std::vector<Weight>{3, 4});
  EXPECT_THROW(expand_weighted(inst, 6), std::length_error);
  EXPECT_EQ(expand_weighted(inst, 7).tree.size(), 7u);
  EXPECT_THROW(expand_weighted(figure1_instance()), std::invalid_argument);
}

TEST(ExpandTest, CollapseClampsTargetIntoChainRange) {
  Instance inst({4, 1}, {{1, 0}}, std::vector<Weight>{3, 1});
  ExpandedInstance ex = expand_weighted(inst);
  // Chain of node 0 is ids 0..2 bottom to top; node 1 is id 3.
  EXPECT_EQ(collapse_chains(inst, ex, {2, 3, 6, 1}), (Assignment{4, 1}));
  EXPECT_EQ(collapse_chains(inst, ex, {5, 5, 6, 1}), (Assignment{5, 1}));
  EXPECT_EQ(collapse_chains(inst, ex, {1, 2, 3, 1}), (Assignment{3, 1}));
  EXPECT_THROW(collapse_chains(inst, ex, {1}), std::invalid_argument);
}

}  // namespace
}  // namespace hiersmooth
