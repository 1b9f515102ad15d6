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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hgens/graph.hpp"
#include "hgens/sparse.hpp"

namespace hgens {

/// Identifies one batch view: (relation group, batch size, batch index).
struct ViewKey {
  std::size_t group = 0;
  std::size_t batch_size = 0;
  std::size_t batch_index = 0;
  friend bool operator==(const ViewKey&, const ViewKey&) = default;
};

struct FanoutConfig {
  std::size_t max_neighbors = 10;  // per node, per relation, per hop
  std::size_t num_hops = 2;        // L
};

/// One epoch's partition of the target set for one batch size.
struct BatchPlan {
  std::uint64_t epoch_seed = 0;
  std::size_t batch_size = 0;
  std::vector<std::vector<std::uint32_t>> batches;
};

/// Seeded Fisher-Yates shuffle, then consecutive chunks of `batch_size`
/// (the last may be short). Throws ValidationError for an empty target set
/// or batch_size == 0.
BatchPlan plan_batches(std::span<const std::uint32_t> target_ids, std::size_t batch_size,
                       std::uint64_t epoch_seed);

/// A relation group together with its full-graph adjacencies, computed once.
struct PreparedGroup {
  RelationGroup group;
  std::vector<RelationAdjacency> full;  // one per relation, same order
};

PreparedGroup prepare_group(const HeterogeneousGraph& g, RelationGroup group);

struct TypedNode {
  NodeTypeId type = 0;
  std::uint32_t id = 0;
  friend bool operator==(const TypedNode&, const TypedNode&) = default;
};

/// Connects node layer l (senders) to layer l + 1 (receivers).
struct ViewHop {
  /// Sampled pattern per relation: rows = layer l+1 nodes, cols = layer l.
  std::vector<RelationAdjacency> sampled;
  /// Row-normalized over the sampled sources; filled by induce_view_adjacencies.
  std::vector<NormalizedAdjacency> normalized;
  /// Non-target-type receivers pass their state through: (row l+1, row l).
  std::vector<std::pair<std::uint32_t, std::uint32_t>> carry;
};

/// The subgraph induced by one batch of targets and its fanout-capped
/// L-hop neighborhood under one relation group.
struct BatchView {
  ViewKey key;
  std::vector<std::uint32_t> target_ids;
  /// layer_nodes[L] are the batch targets; layer_nodes[0] feed the input
  /// transform.
  std::vector<std::vector<TypedNode>> layer_nodes;
  std::vector<ViewHop> hops;  // hops[l] maps layer l -> l + 1

  std::size_t num_hops() const { return hops.size(); }
};

/// Per-view substream seed.
std::uint64_t view_seed(std::uint64_t epoch_seed, const ViewKey& key);

/// Expands `batch` hop by hop. Each target-type receiver samples, without
/// replacement, up to fanout.max_neighbors sources per relation using a
/// substream keyed by (seed, hop, relation, node). Normalized adjacencies are
/// induced before returning.
BatchView expand_neighborhood(const HeterogeneousGraph& g, const PreparedGroup& group,
                              const ViewKey& key, std::span<const std::uint32_t> batch,
                              const FanoutConfig& fanout, std::uint64_t seed);

/// Row-normalizes every sampled hop adjacency over the sampled sources.
void induce_view_adjacencies(BatchView& view);

}  // namespace hgens
