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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hgens/matrix.hpp"
#include "hgens/sparse.hpp"

namespace hgens {

using NodeTypeId = std::uint32_t;
using EdgeTypeId = std::uint32_t;

enum class Split : std::uint8_t { kTrain, kVal, kTest };

std::string_view split_name(Split s);
/// Parses "train" / "val" / "test"; returns false on anything else.
bool parse_split(std::string_view text, Split& out);

struct NodeType {
  std::string name;
  std::size_t count = 0;
  DenseMatrix features;  // count x feature_dim
};

struct EdgeType {
  std::string name;
  NodeTypeId src_type = 0;
  NodeTypeId dst_type = 0;
  bool undirected = false;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (src local id, dst local id)
};

/// Typed nodes and edges, per-type features, and labels/splits on the
/// target node type. Immutable once loaded.
struct HeterogeneousGraph {
  std::vector<NodeType> node_types;
  std::vector<EdgeType> edge_types;
  NodeTypeId target_type = 0;
  std::size_t num_classes = 0;
  std::vector<int> labels;    // one per target node
  std::vector<Split> splits;  // one per target node

  /// Throws ValidationError for an unknown name.
  NodeTypeId node_type_id(std::string_view name) const;
  EdgeTypeId edge_type_id(std::string_view name) const;

  std::size_t node_count(NodeTypeId t) const { return node_types.at(t).count; }
  std::size_t feature_dim(NodeTypeId t) const { return node_types.at(t).features.cols(); }
  std::size_t num_targets() const { return node_count(target_type); }
  std::size_t num_edges() const;
  std::size_t num_nodes() const;

  /// Target ids carrying the given split tag, ascending.
  std::vector<std::uint32_t> split_ids(Split s) const;
};

struct Diagnostic {
  std::string where;
  std::string message;
  std::string str() const { return where.empty() ? message : where + ": " + message; }
};

/// Empty iff every graph invariant holds. Never throws.
std::vector<Diagnostic> validate_graph(const HeterogeneousGraph& g);

// ---------------------------------------------------------------------------
// Relations

struct RelationStep {
  EdgeTypeId edge = 0;
  bool reverse = false;  // traverse dst -> src
};

/// A typed path from src_type to dst_type. Messages flow along the path, so
/// the adjacency is indexed [receiving node, sending node].
struct Relation {
  std::string name;
  std::vector<RelationStep> path;
  NodeTypeId src_type = 0;
  NodeTypeId dst_type = 0;
  bool exclude_self = false;  // drop j == k entries when src_type == dst_type
};

struct RelationGroup {
  std::string name;
  std::vector<Relation> relations;
};

/// Builds a relation from step names; "~name" traverses an edge type in
/// reverse. Throws StructureError for incompatible consecutive steps.
Relation make_relation(const HeterogeneousGraph& g, std::string name,
                       const std::vector<std::string>& steps, bool exclude_self = false);

/// Throws StructureError unless the group is non-empty and every relation
/// ends at the target type.
void check_group(const HeterogeneousGraph& g, const RelationGroup& group);

/// Single-step typed adjacency (receiving type x sending type).
RelationAdjacency step_adjacency(const HeterogeneousGraph& g, RelationStep step);

/// A[j,k] = 1 iff some instance of the relation path connects sending node k
/// to receiving node j. Repeated path instances count once.
RelationAdjacency gen_relation_adjacency(const HeterogeneousGraph& g, const Relation& r);

/// Relation paths of the form target -> T -> target for every edge type that
/// touches the target type (plus direct target-target edge types).
std::vector<Relation> default_metapath_relations(const HeterogeneousGraph& g);

}  // namespace hgens
