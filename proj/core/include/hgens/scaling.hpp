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

#include <vector>

#include "hgens/config.hpp"
#include "hgens/synth.hpp"

namespace hgens {

struct ScalingPoint {
  std::size_t requested_edges = 0;
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  double size = 0.0;  // |V| + |E|
  double mean_epoch_seconds = 0.0;
  double sampled_nodes = 0.0;  // distinct view nodes summed over one epoch's views and layers
  std::size_t epochs = 0;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  double slope = 0.0;  // least squares in log-log space
  double intercept = 0.0;
  double work_slope = 0.0;  // same fit for sampled_nodes
};

/// Least-squares slope and intercept of log(y) against log(x).
std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Synthetic graph with roughly `edges` edges: the base config's degrees are
/// kept and node counts scaled to match.
SynthConfig synth_for_edges(const SynthConfig& base, std::size_t edges);

/// Times `epochs` training epochs (after one warm-up epoch) per size.
/// Throws ValidationError unless there are at least three strictly
/// increasing sizes.
ScalingReport run_scaling(const std::vector<std::size_t>& edge_sizes, const TrainConfig& config,
                          const SynthConfig& synth, std::size_t epochs = 3);

}  // namespace hgens
