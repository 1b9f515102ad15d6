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
#include <nlohmann/json.hpp>

#include "hgens/graph.hpp"

namespace hgens {

/// Planted-partition heterogeneous graph: targets "A" and auxiliary types
/// "B" and "C", each carrying a class. Edge types "ab" and "ac" link every
/// target to aux nodes; with probability signal_* the endpoint is drawn from
/// the target's own class, otherwise uniformly. With probability
/// `complementary` a target routes its signal through only one of the two
/// edge types (chosen uniformly); the other is drawn uniformly for it.
struct SynthConfig {
  std::size_t num_targets = 600;
  std::size_t num_classes = 3;
  std::size_t num_b = 300;
  std::size_t num_c = 300;
  std::size_t degree_ab = 4;  // edge draws per target
  std::size_t degree_ac = 4;
  double signal_ab = 0.9;
  double signal_ac = 0.9;
  double complementary = 0.5;
  std::size_t feature_dim = 16;
  double feature_noise = 3.0;  // sigma_f
  std::uint64_t seed = 0;
};

SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json synth_config_to_json(const SynthConfig& c);

/// Throws ValidationError for probabilities outside [0, 1], fewer than two
/// classes or empty node types.
void validate_synth_config(const SynthConfig& c);

/// Deterministic in the config. Splits are 60/20/20 over a seeded shuffle.
HeterogeneousGraph generate_synthetic(const SynthConfig& c);

}  // namespace hgens
