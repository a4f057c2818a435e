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

// Seeded instance generators. All randomness comes from SplitMix64 so the
// same (seed, parameters) reproduce the same instance in any language:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// and uniform(k) = next() % k. Draw order is documented per generator.

#ifndef HIERSMOOTH_INSTGEN_HPP_
#define HIERSMOOTH_INSTGEN_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "hiersmooth/instance.hpp"

namespace hiersmooth {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, k) by plain modulo.
  std::uint64_t uniform(std::uint64_t k) { return next() % k; }

 private:
  std::uint64_t state_;
};

// Random recursive tree. Draws: parent of i for i = 1..n-1 (uniform in
// [0, i)), then a_i for i = 0..n-1 (uniform in [0, max_a]), then, if
// weighted, w_i for i = 0..n-1 (uniform in [1, max_w]).
inline Instance gen_random_tree(std::size_t n, std::int64_t max_a, std::uint64_t seed,
                                bool weighted = false, std::int64_t max_w = 1) {
  if (n < 1) throw std::invalid_argument("gen_random_tree: n must be >= 1");
  if (max_a < 0) throw std::invalid_argument("gen_random_tree: max_a must be >= 0");
  if (weighted && max_w < 1) throw std::invalid_argument("gen_random_tree: max_w must be >= 1");
  SplitMix64 rng(seed);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (NodeId i = 1; i < n; ++i) edges.push_back({i, static_cast<NodeId>(rng.uniform(i))});
  std::vector<Rational> a(n);
  for (auto& v : a) v = static_cast<long>(rng.uniform(static_cast<std::uint64_t>(max_a) + 1));
  std::optional<std::vector<Weight>> w;
  if (weighted) {
    w.emplace(n);
    for (auto& v : *w) v = 1 + static_cast<Weight>(rng.uniform(static_cast<std::uint64_t>(max_w)));
  }
  return Instance(std::move(a), std::move(edges), std::move(w));
}

// Path rooted at node 0, node i the child of i - 1. Draws: a_i for
// i = 0..n-1 (uniform in [0, max_a]).
inline Instance gen_path_tree(std::size_t n, std::int64_t max_a, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_path_tree: n must be >= 1");
  if (max_a < 0) throw std::invalid_argument("gen_path_tree: max_a must be >= 0");
  SplitMix64 rng(seed);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (NodeId i = 1; i < n; ++i) edges.push_back({i, i - 1});
  std::vector<Rational> a(n);
  for (auto& v : a) v = static_cast<long>(rng.uniform(static_cast<std::uint64_t>(max_a) + 1));
  return Instance(std::move(a), std::move(edges));
}

// Nodes 0..nu-1 form U, nu..nu+nw-1 form W. Draws: for u = 0..nu-1, for
// w = 0..nw-1, edge u -> nu+w iff uniform(100) < edge_prob_percent; then a_i
// for every node in id order (uniform in [0, max_a]).
inline Instance gen_random_bilayer(std::size_t nu, std::size_t nw, std::uint64_t edge_prob_percent,
                                   std::int64_t max_a, std::uint64_t seed) {
  if (nu < 1 || nw < 1) throw std::invalid_argument("gen_random_bilayer: nu and nw must be >= 1");
  if (edge_prob_percent > 100) throw std::invalid_argument("gen_random_bilayer: probability > 100");
  if (max_a < 0) throw std::invalid_argument("gen_random_bilayer: max_a must be >= 0");
  SplitMix64 rng(seed);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < nu; ++u) {
    for (NodeId w = 0; w < nw; ++w) {
      if (rng.uniform(100) < edge_prob_percent) edges.push_back({u, nu + w});
    }
  }
  std::vector<Rational> a(nu + nw);
  for (auto& v : a) v = static_cast<long>(rng.uniform(static_cast<std::uint64_t>(max_a) + 1));
  return Instance(std::move(a), std::move(edges));
}

// Elements are 0-based: sets[i] is a subset of [0, n_elements).
struct SetCoverSpec {
  std::size_t n_elements = 0;
  std::vector<std::vector<std::size_t>> sets;
};

// Set-cover gadget: node i < m is set S_i (a = 1, w = 1), node m + j is
// element j (a = number of sets containing j minus one, w = m), with an edge
// from S_i to element j whenever j is in S_i. Its integral weighted-l1
// optimum equals the minimum cover size.
inline Instance gen_setcover_instance(const SetCoverSpec& spec) {
  const std::size_t m = spec.sets.size();
  if (m == 0 || spec.n_elements == 0) throw std::invalid_argument("gen_setcover_instance: empty spec");
  std::vector<std::int64_t> degree(spec.n_elements, 0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    std::set<std::size_t> members(spec.sets[i].begin(), spec.sets[i].end());
    for (std::size_t j : members) {
      if (j >= spec.n_elements) throw std::invalid_argument("gen_setcover_instance: element out of range");
      ++degree[j];
      edges.push_back({i, m + j});
    }
  }
  std::vector<Rational> a(m + spec.n_elements);
  std::vector<Weight> w(m + spec.n_elements);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = 1;
    w[i] = 1;
  }
  for (std::size_t j = 0; j < spec.n_elements; ++j) {
    if (degree[j] == 0) {
      throw std::invalid_argument("gen_setcover_instance: element " + std::to_string(j) +
                                  " is in no set");
    }
    a[m + j] = static_cast<long>(degree[j] - 1);
    w[m + j] = static_cast<Weight>(m);
  }
  return Instance(std::move(a), std::move(edges), std::move(w));
}

// Root a=8 over a middle node a=8 over two leaves a=5. Bottom-up
// initialisation scores 4; the optimum is 2.
inline Instance figure1_instance() {
  return Instance({8, 8, 5, 5}, {{1, 0}, {2, 1}, {3, 1}});
}

}  // namespace hiersmooth

#endif  // HIERSMOOTH_INSTGEN_HPP_
