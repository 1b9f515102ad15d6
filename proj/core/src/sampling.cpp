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

#include "hgens/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "hgens/error.hpp"
#include "hgens/rng.hpp"

namespace hgens {

BatchPlan plan_batches(std::span<const std::uint32_t> target_ids, std::size_t batch_size,
                       std::uint64_t epoch_seed) {
  if (target_ids.empty()) throw ValidationError("plan_batches: empty target set");
  if (batch_size == 0) throw ValidationError("plan_batches: batch size must be >= 1");
  std::vector<std::uint32_t> order(target_ids.begin(), target_ids.end());
  Rng rng(derive_seed(epoch_seed, {tag("batch-plan"), batch_size}));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[uniform_below(rng, i)]);
  }
  BatchPlan plan;
  plan.epoch_seed = epoch_seed;
  plan.batch_size = batch_size;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const auto end = std::min(order.size(), start + batch_size);
    plan.batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return plan;
}

PreparedGroup prepare_group(const HeterogeneousGraph& g, RelationGroup group) {
  check_group(g, group);
  PreparedGroup p;
  for (const auto& r : group.relations) p.full.push_back(gen_relation_adjacency(g, r));
  p.group = std::move(group);
  return p;
}

std::uint64_t view_seed(std::uint64_t epoch_seed, const ViewKey& key) {
  return derive_seed(epoch_seed, {tag("view"), key.group, key.batch_size, key.batch_index});
}

namespace {

class NodeInterner {
 public:
  std::uint32_t intern(NodeTypeId type, std::uint32_t id) {
    const std::uint64_t k = (static_cast<std::uint64_t>(type) << 32) | id;
    auto [it, inserted] = index_.try_emplace(k, static_cast<std::uint32_t>(nodes_.size()));
    if (inserted) nodes_.push_back({type, id});
    return it->second;
  }
  std::vector<TypedNode> take() { return std::move(nodes_); }

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::vector<TypedNode> nodes_;
};

// Up to `cap` distinct entries of `neighbors`, returned in ascending order.
void sample_neighbors(std::span<const std::uint32_t> neighbors, std::size_t cap,
                      std::uint64_t seed, std::vector<std::uint32_t>& out) {
  out.assign(neighbors.begin(), neighbors.end());
  if (out.size() <= cap) return;
  Rng rng(seed);
  for (std::size_t i = 0; i < cap; ++i) {
    const auto j = i + uniform_below(rng, out.size() - i);
    std::swap(out[i], out[j]);
  }
  out.resize(cap);
  std::sort(out.begin(), out.end());
}

}  // namespace

BatchView expand_neighborhood(const HeterogeneousGraph& g, const PreparedGroup& group,
                              const ViewKey& key, std::span<const std::uint32_t> batch,
                              const FanoutConfig& fanout, std::uint64_t seed) {
  if (batch.empty()) throw ValidationError("expand_neighborhood: empty batch");
  if (fanout.num_hops < 1 || fanout.max_neighbors < 1) {
    throw ValidationError("expand_neighborhood: fanout and hop count must be >= 1");
  }
  const std::size_t L = fanout.num_hops;
  const auto& rels = group.group.relations;

  BatchView view;
  view.key = key;
  view.target_ids.assign(batch.begin(), batch.end());
  view.layer_nodes.resize(L + 1);
  view.hops.resize(L);
  for (auto id : batch) view.layer_nodes[L].push_back({g.target_type, id});

  std::vector<std::uint32_t> picked;
  for (std::size_t layer = L; layer-- > 0;) {
    const auto& receivers = view.layer_nodes[layer + 1];
    auto& hop = view.hops[layer];
    NodeInterner senders;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs(rels.size());
    for (std::uint32_t ri = 0; ri < receivers.size(); ++ri) {
      const auto& recv = receivers[ri];
      if (recv.type != g.target_type) {
        hop.carry.emplace_back(ri, senders.intern(recv.type, recv.id));
        continue;
      }
      for (std::size_t j = 0; j < rels.size(); ++j) {
        const auto s = derive_seed(seed, {layer, j, recv.id});
        sample_neighbors(group.full[j].row(recv.id), fanout.max_neighbors, s, picked);
        for (auto src : picked) pairs[j].emplace_back(ri, senders.intern(rels[j].src_type, src));
      }
    }
    view.layer_nodes[layer] = senders.take();
    const auto n_send = view.layer_nodes[layer].size();
    for (std::size_t j = 0; j < rels.size(); ++j) {
      hop.sampled.push_back(
          RelationAdjacency::from_pairs(receivers.size(), n_send, std::move(pairs[j])));
    }
  }
  induce_view_adjacencies(view);
  return view;
}

void induce_view_adjacencies(BatchView& view) {
  for (auto& hop : view.hops) {
    hop.normalized.clear();
    for (const auto& a : hop.sampled) hop.normalized.push_back(normalize_adjacency(a));
  }
}

}  // namespace hgens
