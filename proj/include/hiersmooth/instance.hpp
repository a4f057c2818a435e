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

// Instance model shared by every solver: the child->parent graph, target
// values a, optional integer weights, the text format, shape classification
// and feasibility / objective evaluation.

#ifndef HIERSMOOTH_INSTANCE_HPP_
#define HIERSMOOTH_INSTANCE_HPP_

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hiersmooth/rational.hpp"

namespace hiersmooth {

using NodeId = std::size_t;
using Weight = std::int64_t;

// x_i for every node, indexed by NodeId.
using Assignment = std::vector<Rational>;

enum class ShapeKind { kTree, kDag, kBilayer };
enum class Norm { kL1, kLinf };

inline std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kTree: return "tree";
    case ShapeKind::kDag: return "dag";
    case ShapeKind::kBilayer: return "bilayer";
  }
  return "?";
}

// Edges point from child to parent: the parent's value must cover the sum of
// its children's values.
struct Edge {
  NodeId child;
  NodeId parent;
  friend bool operator==(const Edge&, const Edge&) = default;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InstanceError {
 public:
  // line == 0 marks a whole-file problem (e.g. a cycle).
  ParseError(std::size_t line, const std::string& what)
      : InstanceError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Raised by solvers whose input shape requirement is not met.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Instance {
 public:
  // Validates and indexes the graph. Throws InstanceError on negative
  // targets, out-of-range or duplicate edges, non-positive weights or cycles.
  Instance(std::vector<Rational> a, std::vector<Edge> edges,
           std::optional<std::vector<Weight>> weights = std::nullopt)
      : a_(std::move(a)), edges_(std::move(edges)), weights_(std::move(weights)) {
    const std::size_t n = a_.size();
    if (n == 0) throw InstanceError("instance must have at least one node");
    for (std::size_t i = 0; i < n; ++i) {
      if (a_[i] < 0) throw InstanceError("negative target value at node " + std::to_string(i));
    }
    if (weights_) {
      if (weights_->size() != n) throw InstanceError("weight vector length mismatch");
      for (std::size_t i = 0; i < n; ++i) {
        if ((*weights_)[i] < 1) {
          throw InstanceError("non-positive weight at node " + std::to_string(i));
        }
      }
    }
    children_.assign(n, {});
    parents_.assign(n, {});
    for (const Edge& e : edges_) {
      if (e.child >= n || e.parent >= n) throw InstanceError("edge references unknown node");
      children_[e.parent].push_back(e.child);
      parents_[e.child].push_back(e.parent);
    }
    for (std::size_t v = 0; v < n; ++v) {
      auto& c = children_[v];
      std::sort(c.begin(), c.end());
      if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
        throw InstanceError("duplicate edge into node " + std::to_string(v));
      }
      std::sort(parents_[v].begin(), parents_[v].end());
    }
    compute_topo_order();
  }

  std::size_t size() const { return a_.size(); }
  const std::vector<Rational>& a() const { return a_; }
  const Rational& a(NodeId i) const { return a_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_weights() const { return weights_.has_value(); }
  const std::optional<std::vector<Weight>>& weights() const { return weights_; }
  // 1 for unweighted instances.
  Weight weight(NodeId i) const { return weights_ ? (*weights_)[i] : 1; }

  // Sorted ascending.
  std::span<const NodeId> children(NodeId v) const { return children_[v]; }
  std::span<const NodeId> parents(NodeId v) const { return parents_[v]; }

  // Children before parents; ties broken by ascending id.
  const std::vector<NodeId>& topo_order() const { return topo_; }

 private:
  void compute_topo_order() {
    const std::size_t n = a_.size();
    std::vector<std::size_t> pending(n);
    for (std::size_t v = 0; v < n; ++v) pending[v] = children_[v].size();
    // Min-heap on ids keeps the order deterministic.
    std::vector<NodeId> ready;
    for (std::size_t v = 0; v < n; ++v) {
      if (pending[v] == 0) ready.push_back(v);
    }
    auto cmp = std::greater<NodeId>{};
    std::make_heap(ready.begin(), ready.end(), cmp);
    topo_.reserve(n);
    while (!ready.empty()) {
      std::pop_heap(ready.begin(), ready.end(), cmp);
      NodeId v = ready.back();
      ready.pop_back();
      topo_.push_back(v);
      for (NodeId p : parents_[v]) {
        if (--pending[p] == 0) {
          ready.push_back(p);
          std::push_heap(ready.begin(), ready.end(), cmp);
        }
      }
    }
    if (topo_.size() != n) throw InstanceError("cycle detected");
  }

  std::vector<Rational> a_;
  std::vector<Edge> edges_;
  std::optional<std::vector<Weight>> weights_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<NodeId> topo_;
};

struct ShapeReport {
  ShapeKind kind = ShapeKind::kDag;
  // Every node has at most one parent and exactly one node has none.
  bool is_tree = false;
  // No node has both a parent and a child, and there is at least one edge.
  bool is_bilayer = false;
  std::vector<NodeId> topo_order;
  // Only filled for trees; children visited in ascending id order.
  std::vector<NodeId> post_order;
  std::optional<NodeId> root;
};

// Classifies the instance. A depth-one graph is reported as bilayer even when
// it is also a tree (a star); is_tree is set independently so tree solvers
// still accept it.
inline ShapeReport validate(const Instance& inst) {
  ShapeReport report;
  const std::size_t n = inst.size();
  report.topo_order = inst.topo_order();

  std::size_t roots = 0;
  bool single_parent = true;
  bool depth_one = !inst.edges().empty();
  for (NodeId v = 0; v < n; ++v) {
    const auto np = inst.parents(v).size();
    if (np == 0) ++roots;
    if (np > 1) single_parent = false;
    if (np > 0 && !inst.children(v).empty()) depth_one = false;
  }
  report.is_tree = single_parent && roots == 1;
  report.is_bilayer = depth_one;

  if (report.is_tree) {
    NodeId root = 0;
    for (NodeId v = 0; v < n; ++v) {
      if (inst.parents(v).empty()) root = v;
    }
    report.root = root;
    report.post_order.reserve(n);
    // Iterative post-order: (node, next child index).
    std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      auto kids = inst.children(v);
      if (next < kids.size()) {
        NodeId c = kids[next++];
        stack.emplace_back(c, 0);
      } else {
        report.post_order.push_back(v);
        stack.pop_back();
      }
    }
  }

  if (report.is_bilayer) {
    report.kind = ShapeKind::kBilayer;
  } else if (report.is_tree) {
    report.kind = ShapeKind::kTree;
  } else {
    report.kind = ShapeKind::kDag;
  }
  return report;
}

inline Rational children_sum(const Instance& inst, const Assignment& x, NodeId v) {
  Rational s = 0;
  for (NodeId c : inst.children(v)) s += x[c];
  return s;
}

inline bool is_feasible(const Instance& inst, const Assignment& x) {
  if (x.size() != inst.size()) throw std::invalid_argument("assignment length mismatch");
  for (NodeId v = 0; v < inst.size(); ++v) {
    if (x[v] < 0) return false;
    if (x[v] < children_sum(inst, x, v)) return false;
  }
  return true;
}

inline Rational objective(const Instance& inst, const Assignment& x, Norm norm,
                          bool weighted = false) {
  if (x.size() != inst.size()) throw std::invalid_argument("assignment length mismatch");
  if (weighted && !inst.has_weights()) {
    throw std::invalid_argument("weighted objective requested on an unweighted instance");
  }
  if (weighted && norm != Norm::kL1) {
    throw std::invalid_argument("weighted objective is only defined for l1");
  }
  Rational total = 0;
  for (NodeId i = 0; i < inst.size(); ++i) {
    Rational dev = abs(Rational(x[i] - inst.a(i)));
    if (norm == Norm::kLinf) {
      if (dev > total) total = dev;
    } else if (weighted) {
      total += dev * inst.weight(i);
    } else {
      total += dev;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Text format
//
//   sbhsp 1
//   nodes <N>
//   node <id> a=<rational> [w=<positive-int>]     (N lines, any id order)
//   edge <child-id> <parent-id>                   (zero or more)
//
// '#' starts a comment. When any node carries w=, nodes without it get 1.

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  std::size_t v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(ch - '0');
  }
  return v;
}

}  // namespace detail

inline Instance parse_instance(std::istream& in) {
  enum class Stage { kHeader, kCount, kNodes, kEdges };
  Stage stage = Stage::kHeader;
  std::size_t n = 0;
  std::size_t nodes_seen = 0;
  std::vector<std::optional<Rational>> a;
  std::vector<std::optional<Weight>> w;
  bool any_weight = false;
  std::vector<Edge> edges;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;

    switch (stage) {
      case Stage::kHeader:
        if (tok.size() != 2 || tok[0] != "sbhsp") throw ParseError(lineno, "expected 'sbhsp 1'");
        if (tok[1] != "1") throw ParseError(lineno, "unsupported format version");
        stage = Stage::kCount;
        break;
      case Stage::kCount: {
        if (tok.size() != 2 || tok[0] != "nodes") throw ParseError(lineno, "expected 'nodes <N>'");
        auto count = detail::parse_index(tok[1]);
        if (!count || *count == 0) throw ParseError(lineno, "node count must be a positive integer");
        n = *count;
        a.assign(n, std::nullopt);
        w.assign(n, std::nullopt);
        stage = Stage::kNodes;
        break;
      }
      case Stage::kNodes: {
        if (tok[0] != "node") throw ParseError(lineno, "expected 'node' directive");
        if (tok.size() < 3 || tok.size() > 4) {
          throw ParseError(lineno, "expected 'node <id> a=<rational> [w=<int>]'");
        }
        auto id = detail::parse_index(tok[1]);
        if (!id) throw ParseError(lineno, "malformed node id");
        if (*id >= n) throw ParseError(lineno, "node id out of range");
        if (a[*id]) throw ParseError(lineno, "duplicate node id " + std::to_string(*id));
        for (std::size_t k = 2; k < tok.size(); ++k) {
          std::string_view t = tok[k];
          if (t.starts_with("a=")) {
            if (a[*id]) throw ParseError(lineno, "repeated a=");
            auto r = parse_rational(t.substr(2));
            if (!r) throw ParseError(lineno, "malformed rational '" + std::string(t.substr(2)) + "'");
            if (*r < 0) throw ParseError(lineno, "negative target value");
            a[*id] = *r;
          } else if (t.starts_with("w=")) {
            if (w[*id]) throw ParseError(lineno, "repeated w=");
            std::string_view ws = t.substr(2);
            bool negative = ws.starts_with('-');
            auto wv = detail::parse_index(negative ? ws.substr(1) : ws);
            if (!wv) throw ParseError(lineno, "weight must be a positive integer");
            if (negative || *wv == 0) throw ParseError(lineno, "non-positive weight");
            w[*id] = static_cast<Weight>(*wv);
            any_weight = true;
          } else {
            throw ParseError(lineno, "unknown attribute '" + std::string(t) + "'");
          }
        }
        if (!a[*id]) throw ParseError(lineno, "missing a=");
        if (++nodes_seen == n) stage = Stage::kEdges;
        break;
      }
      case Stage::kEdges: {
        if (tok[0] != "edge") throw ParseError(lineno, "expected 'edge' directive");
        if (tok.size() != 3) throw ParseError(lineno, "expected 'edge <child> <parent>'");
        auto c = detail::parse_index(tok[1]);
        auto p = detail::parse_index(tok[2]);
        if (!c || !p) throw ParseError(lineno, "malformed edge endpoint");
        if (*c >= n || *p >= n) throw ParseError(lineno, "edge to unknown node id");
        if (*c == *p) throw ParseError(lineno, "cycle detected (self loop)");
        edges.push_back({*c, *p});
        break;
      }
    }
  }
  if (stage == Stage::kHeader) throw ParseError(lineno + 1, "missing 'sbhsp 1' header");
  if (stage == Stage::kCount) throw ParseError(lineno + 1, "missing 'nodes <N>' line");
  if (stage == Stage::kNodes) throw ParseError(lineno + 1, "fewer node lines than declared");

  std::vector<Rational> av(n);
  for (std::size_t i = 0; i < n; ++i) av[i] = *a[i];
  std::optional<std::vector<Weight>> wv;
  if (any_weight) {
    wv.emplace(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i]) (*wv)[i] = *w[i];
    }
  }
  try {
    return Instance(std::move(av), std::move(edges), std::move(wv));
  } catch (const ParseError&) {
    throw;
  } catch (const InstanceError& e) {
    throw ParseError(0, e.what());
  }
}

inline Instance parse_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_instance(in);
}

inline std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  out << "sbhsp 1\n";
  out << "nodes " << inst.size() << "\n";
  for (NodeId i = 0; i < inst.size(); ++i) {
    out << "node " << i << " a=" << to_string(inst.a(i));
    if (inst.has_weights()) out << " w=" << inst.weight(i);
    out << "\n";
  }
  for (const Edge& e : inst.edges()) out << "edge " << e.child << " " << e.parent << "\n";
  return out.str();
}

inline std::string format_solution(const Assignment& x, const Rational& objective_value) {
  std::ostringstream out;
  for (NodeId i = 0; i < x.size(); ++i) out << "x " << i << " " << to_string(x[i]) << "\n";
  out << "objective " << to_string(objective_value) << "\n";
  return out.str();
}

}  // namespace hiersmooth

#endif  // HIERSMOOTH_INSTANCE_HPP_
