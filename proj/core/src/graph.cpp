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

#include "hgens/graph.hpp"

#include <cmath>

#include "hgens/error.hpp"

namespace hgens {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

bool parse_split(std::string_view text, Split& out) {
  if (text == "train") {
    out = Split::kTrain;
  } else if (text == "val") {
    out = Split::kVal;
  } else if (text == "test") {
    out = Split::kTest;
  } else {
    return false;
  }
  return true;
}

NodeTypeId HeterogeneousGraph::node_type_id(std::string_view name) const {
  for (std::size_t i = 0; i < node_types.size(); ++i) {
    if (node_types[i].name == name) return static_cast<NodeTypeId>(i);
  }
  throw ValidationError("unknown node type '" + std::string(name) + "'");
}

EdgeTypeId HeterogeneousGraph::edge_type_id(std::string_view name) const {
  for (std::size_t i = 0; i < edge_types.size(); ++i) {
    if (edge_types[i].name == name) return static_cast<EdgeTypeId>(i);
  }
  throw ValidationError("unknown edge type '" + std::string(name) + "'");
}

std::size_t HeterogeneousGraph::num_edges() const {
  std::size_t n = 0;
  for (const auto& e : edge_types) n += e.edges.size();
  return n;
}

std::size_t HeterogeneousGraph::num_nodes() const {
  std::size_t n = 0;
  for (const auto& t : node_types) n += t.count;
  return n;
}

std::vector<std::uint32_t> HeterogeneousGraph::split_ids(Split s) const {
  std::vector<std::uint32_t> ids;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == s) ids.push_back(static_cast<std::uint32_t>(i));
  }
  return ids;
}

std::vector<Diagnostic> validate_graph(const HeterogeneousGraph& g) {
  std::vector<Diagnostic> out;
  auto add = [&](std::string where, std::string msg) {
    out.push_back({std::move(where), std::move(msg)});
  };
  if (g.node_types.empty()) add("graph", "no node types");
  for (const auto& t : g.node_types) {
    if (t.features.rows() != t.count) {
      add("node type " + t.name, "feature matrix has " + std::to_string(t.features.rows()) +
                                     " rows, expected " + std::to_string(t.count));
    }
    for (std::size_t r = 0; r < t.features.rows(); ++r) {
      bool finite = true;
      for (double v : t.features.row(r)) finite = finite && std::isfinite(v);
      if (!finite) {
        add("node type " + t.name, "non-finite feature in row " + std::to_string(r));
        break;
      }
    }
  }
  for (const auto& e : g.edge_types) {
    if (e.src_type >= g.node_types.size() || e.dst_type >= g.node_types.size()) {
      add("edge type " + e.name, "endpoint type out of range");
      continue;
    }
    const auto ns = g.node_types[e.src_type].count;
    const auto nd = g.node_types[e.dst_type].count;
    for (std::size_t i = 0; i < e.edges.size(); ++i) {
      const auto [s, d] = e.edges[i];
      if (s >= ns || d >= nd) {
        add("edge type " + e.name, "edge " + std::to_string(i) + " (" + std::to_string(s) + "," +
                                       std::to_string(d) + ") out of range");
        break;
      }
    }
  }
  if (g.target_type >= g.node_types.size()) {
    add("graph", "target type out of range");
    return out;
  }
  if (g.num_classes < 1) add("graph", "num_classes must be >= 1");
  const auto nt = g.num_targets();
  if (g.splits.size() != nt) {
    add("splits", "expected " + std::to_string(nt) + " split tags, got " +
                      std::to_string(g.splits.size()));
  }
  if (g.labels.size() != nt) {
    add("labels", "expected " + std::to_string(nt) + " labels, got " +
                      std::to_string(g.labels.size()));
  } else {
    for (std::size_t i = 0; i < nt; ++i) {
      if (g.labels[i] < 0 || static_cast<std::size_t>(g.labels[i]) >= g.num_classes) {
        add("labels", "node " + std::to_string(i) + " has label " + std::to_string(g.labels[i]) +
                          " outside [0, " + std::to_string(g.num_classes) + ")");
      }
    }
  }
  return out;
}

Relation make_relation(const HeterogeneousGraph& g, std::string name,
                       const std::vector<std::string>& steps, bool exclude_self) {
  if (steps.empty()) throw StructureError("relation '" + name + "' has an empty path");
  Relation r;
  r.name = std::move(name);
  r.exclude_self = exclude_self;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string_view s = steps[i];
    RelationStep step;
    if (!s.empty() && s.front() == '~') {
      step.reverse = true;
      s.remove_prefix(1);
    }
    try {
      step.edge = g.edge_type_id(s);
    } catch (const ValidationError& e) {
      throw StructureError("relation '" + r.name + "': " + e.what());
    }
    const auto& et = g.edge_types[step.edge];
    const NodeTypeId from = step.reverse ? et.dst_type : et.src_type;
    const NodeTypeId to = step.reverse ? et.src_type : et.dst_type;
    if (i == 0) {
      r.src_type = from;
    } else if (from != r.dst_type) {
      throw StructureError("relation '" + r.name + "': step " + std::to_string(i) + " starts at " +
                           g.node_types[from].name + " but previous step ends at " +
                           g.node_types[r.dst_type].name);
    }
    r.dst_type = to;
    r.path.push_back(step);
  }
  return r;
}

void check_group(const HeterogeneousGraph& g, const RelationGroup& group) {
  if (group.relations.empty()) {
    throw StructureError("relation group '" + group.name + "' is empty");
  }
  for (const auto& r : group.relations) {
    if (r.dst_type != g.target_type) {
      throw StructureError("relation '" + r.name + "' in group '" + group.name +
                           "' does not end at the target type");
    }
  }
}

RelationAdjacency step_adjacency(const HeterogeneousGraph& g, RelationStep step) {
  const auto& et = g.edge_types.at(step.edge);
  const NodeTypeId recv = step.reverse ? et.src_type : et.dst_type;
  const NodeTypeId send = step.reverse ? et.dst_type : et.src_type;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(et.edges.size() * (et.undirected ? 2 : 1));
  for (const auto& [s, d] : et.edges) {
    pairs.emplace_back(step.reverse ? s : d, step.reverse ? d : s);
    // Same-type undirected edges are symmetric in either direction.
    if (et.undirected && et.src_type == et.dst_type) {
      pairs.emplace_back(step.reverse ? d : s, step.reverse ? s : d);
    }
  }
  return RelationAdjacency::from_pairs(g.node_count(recv), g.node_count(send), std::move(pairs));
}

RelationAdjacency gen_relation_adjacency(const HeterogeneousGraph& g, const Relation& r) {
  if (r.path.empty()) throw StructureError("relation '" + r.name + "' has an empty path");
  NodeTypeId at = r.src_type;
  RelationAdjacency acc;
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    const auto& et = g.edge_types.at(r.path[i].edge);
    const NodeTypeId from = r.path[i].reverse ? et.dst_type : et.src_type;
    if (from != at) {
      throw StructureError("relation '" + r.name + "' is not type-compatible at step " +
                           std::to_string(i));
    }
    at = r.path[i].reverse ? et.src_type : et.dst_type;
    auto step = step_adjacency(g, r.path[i]);
    acc = i == 0 ? std::move(step) : step.bool_product(acc);
  }
  if (at != r.dst_type) throw StructureError("relation '" + r.name + "' ends at the wrong type");
  if (r.exclude_self && r.src_type == r.dst_type) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t row = 0; row < acc.rows; ++row) {
      for (auto c : acc.row(row)) {
        if (c != row) pairs.emplace_back(static_cast<std::uint32_t>(row), c);
      }
    }
    acc = RelationAdjacency::from_pairs(acc.rows, acc.cols, std::move(pairs));
  }
  return acc;
}

std::vector<Relation> default_metapath_relations(const HeterogeneousGraph& g) {
  std::vector<Relation> out;
  const auto t = g.target_type;
  const auto& tname = g.node_types[t].name;
  for (const auto& et : g.edge_types) {
    if (et.src_type == t && et.dst_type == t) {
      out.push_back(make_relation(g, tname + "-" + et.name, {et.name}));
      continue;
    }
    if (et.src_type == t) {
      const auto& other = g.node_types[et.dst_type].name;
      out.push_back(make_relation(g, tname + other + tname, {et.name, "~" + et.name}));
    } else if (et.dst_type == t) {
      const auto& other = g.node_types[et.src_type].name;
      out.push_back(make_relation(g, tname + other + tname, {"~" + et.name, et.name}));
    }
  }
  return out;
}

}  // namespace hgens
