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

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hgens/fusion.hpp"
#include "hgens/graph.hpp"
#include "hgens/sampling.hpp"

namespace hgens {

struct RelationSpec {
  std::string name;
  std::vector<std::string> path;  // edge type names, "~" prefix = reverse
  bool exclude_self = false;
};

struct GroupSpec {
  std::string name;
  std::vector<std::string> relations;
};

/// Flat training configuration. Serialized as one JSON object; every key is
/// optional and falls back to the defaults below.
struct TrainConfig {
  std::size_t hidden_dim = 64;
  std::size_t num_layers = 2;
  double dropout = 0.1;
  std::size_t fanout = 10;
  std::vector<std::size_t> batch_sizes{64, 256};
  std::vector<RelationSpec> relations;  // empty: target-other-target metapaths
  std::vector<GroupSpec> groups;        // empty: one group per relation
  double lambda = 1e-3;
  double lr = 1e-3;
  double weight_decay = 5e-4;
  std::size_t max_epochs = 300;
  std::size_t patience = 30;
  std::uint64_t seed = 0;
  AttentionMode attention = AttentionMode::kMinMax;
  bool regularizer = true;
  FusionMode fusion = FusionMode::kAttention;
  std::size_t attn_dim = 16;
  std::size_t group_attn_dim = 16;
  bool exclude_diagonal = false;
  std::uint64_t eval_seed = 20240601;
  std::size_t threads = 1;
  bool unsafe_hparams = false;
};

TrainConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const TrainConfig& c);

/// Reads a config file (or returns defaults for an empty path) and applies
/// "key=value" overrides in order; values parse as JSON when possible and as
/// plain strings otherwise.
TrainConfig load_config(const std::filesystem::path& file,
                        const std::vector<std::string>& overrides = {});

/// Throws ValidationError for out-of-range values. Unless unsafe_hparams is
/// set, hidden_dim, num_layers, dropout and fanout must come from the
/// published search grid.
void validate_config(const TrainConfig& c);

/// Resolves relation and group specs against the graph.
std::vector<PreparedGroup> resolve_groups(const TrainConfig& c, const HeterogeneousGraph& g);

}  // namespace hgens
