// Copyright 2026 The hgens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Brute-force typed-path enumeration over raw edge lists.

#include <functional>
#include <string>
#include <vector>

#include "hgens/graph.hpp"
#include "support/testing.hpp"

namespace hgens::testing {

// Does edge type `e` contain an edge from -> to when walked in the given
// direction? Scans the raw edge list.
inline bool walks(const EdgeType& e, bool reverse, std::uint32_t from, std::uint32_t to) {
  for (auto [s, d] : e.edges) {
    if (!reverse && s == from && d == to) return true;
    if (reverse && d == from && s == to) return true;
    if (e.undirected && e.src_type == e.dst_type) {
      if (!reverse && d == from && s == to) return true;
      if (reverse && s == from && d == to) return true;
    }
  }
  return false;
}

// A[j][k] = 1 iff some node sequence k = n0 -> n1 -> ... -> nL = j follows
// the path. Brute-force over every intermediate node.
inline Dense enumerate_paths(const HeterogeneousGraph& g, const Relation& r) {
  const auto ns = g.node_count(r.src_type);
  const auto nt = g.node_count(r.dst_type);
  Dense a(nt, std::vector<double>(ns, 0.0));
  std::function<void(std::size_t, std::uint32_t, std::uint32_t)> go = [&](std::size_t step, std::uint32_t start,
                                                                        std::uint32_t at) {
    if (step == r.path.size()) {
      if (!(r.exclude_self && r.src_type == r.dst_type && at == start)) a[at][start] = 1.0;
      return;
    }
    const auto& e = g.edge_types[r.path[step].edge];
    const auto next_type = r.path[step].reverse ? e.src_type : e.dst_type;
    for (std::uint32_t nxt = 0; nxt < g.node_count(next_type); ++nxt) {
      if (walks(e, r.path[step].reverse, at, nxt)) go(step + 1, start, nxt);
    }
  };
  for (std::uint32_t k = 0; k < ns; ++k) go(0, k, k);
  return a;
}

// Every path of length 1 or 2 that the graph's types allow.
inline std::vector<std::vector<std::string>> all_paths(const HeterogeneousGraph& g) {
  std::vector<std::pair<std::string, std::pair<NodeTypeId, NodeTypeId>>> steps;
  for (const auto& e : g.edge_types) {
    steps.push_back({e.name, {e.src_type, e.dst_type}});
    steps.push_back({"~" + e.name, {e.dst_type, e.src_type}});
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& s1 : steps) {
    out.push_back({s1.first});
    for (const auto& s2 : steps) {
      if (s2.second.first == s1.second.second) out.push_back({s1.first, s2.first});
    }
  }
  return out;
}

}  // namespace hgens::testing
