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

// Full-graph dense evaluation of the relational encoder. Relation
// adjacencies are built by dense boolean products of per-edge-type 0/1
// matrices, so no sparse code from the library is involved.

#include <algorithm>
#include <vector>

#include "hgens/graph.hpp"
#include "support/testing.hpp"

namespace hgens::testing {

/// 0/1 matrix, rows = receiving nodes of `r`, cols = sending nodes.
inline Dense dense_relation(const HeterogeneousGraph& g, const Relation& r) {
  Dense acc;
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    const auto& et = g.edge_types[r.path[i].edge];
    const bool rev = r.path[i].reverse;
    const auto recv = rev ? et.src_type : et.dst_type;
    const auto send = rev ? et.dst_type : et.src_type;
    Dense step(g.node_types[recv].count, std::vector<double>(g.node_types[send].count, 0.0));
    for (auto [s, d] : et.edges) {
      if (rev) step[s][d] = 1.0;
      else step[d][s] = 1.0;
      if (et.undirected && et.src_type == et.dst_type) {
        if (rev) step[d][s] = 1.0;
        else step[s][d] = 1.0;
      }
    }
    if (i == 0) {
      acc = step;
      continue;
    }
    Dense prod = naive_matmul(step, acc);
    for (auto& row : prod) {
      for (double& v : row) v = v > 0.0 ? 1.0 : 0.0;
    }
    acc = std::move(prod);
  }
  if (r.exclude_self && r.src_type == r.dst_type) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i][i] = 0.0;
  }
  return acc;
}

inline Dense relu_dense(Dense a) {
  for (auto& row : a) {
    for (double& v : row) v = std::max(v, 0.0);
  }
  return a;
}

/// H^(0)_t = ReLU(X_t W_t) for every node type; then L layers where target
/// rows become ReLU(sum_j A~_j H_src(j) W_j^(l)) and every other type keeps
/// its state. Returns the target rows of H^(L).
inline Dense dense_encode(const HeterogeneousGraph& g, const std::vector<Relation>& relations,
                          const std::vector<DenseMatrix>& input_weights,
                          const std::vector<std::vector<DenseMatrix>>& relation_weights,
                          std::size_t layers, bool relu = true) {
  auto act = [&](Dense a) { return relu ? relu_dense(std::move(a)) : a; };
  std::vector<Dense> state;
  for (std::size_t t = 0; t < g.node_types.size(); ++t) {
    state.push_back(act(naive_matmul(to_dense(g.node_types[t].features), to_dense(input_weights[t]))));
  }
  std::vector<Dense> adj;
  for (const auto& r : relations) adj.push_back(naive_row_normalize(dense_relation(g, r)));
  const auto t = g.target_type;
  for (std::size_t l = 0; l < layers; ++l) {
    Dense pre(g.node_types[t].count, std::vector<double>(relation_weights[0][l].cols(), 0.0));
    for (std::size_t j = 0; j < relations.size(); ++j) {
      const Dense term = naive_matmul(naive_matmul(adj[j], state[relations[j].src_type]),
                                      to_dense(relation_weights[j][l]));
      for (std::size_t a = 0; a < pre.size(); ++a) {
        for (std::size_t b = 0; b < pre[a].size(); ++b) pre[a][b] += term[a][b];
      }
    }
    state[t] = act(std::move(pre));
  }
  return state[t];
}

}  // namespace hgens::testing
