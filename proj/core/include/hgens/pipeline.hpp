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
#include <vector>

#include "hgens/config.hpp"
#include "hgens/encoder.hpp"
#include "hgens/fusion.hpp"
#include "hgens/model.hpp"
#include "hgens/objective.hpp"
#include "hgens/sampling.hpp"

namespace hgens {

struct PipelineOptions {
  std::size_t num_layers = 2;
  std::size_t fanout = 10;
  std::vector<std::size_t> batch_sizes{64};
  double dropout = 0.0;
  AttentionMode attention = AttentionMode::kMinMax;
  FusionMode fusion = FusionMode::kAttention;
  double lambda = 0.0;  // effective weight; 0 disables the regularizer
  bool exclude_diagonal = false;
  Activation activation = Activation::kRelu;
  std::size_t threads = 1;
};

PipelineOptions options_from_config(const TrainConfig& c);

/// Immutable inputs shared by every forward pass of one run.
struct Pipeline {
  const HeterogeneousGraph* graph = nullptr;
  std::vector<PreparedGroup> groups;
  PipelineOptions opts;
  std::vector<std::uint32_t> targets;     // all target ids, canonical order
  std::vector<std::uint32_t> train_rows;  // rows entering the loss

  Pipeline(const HeterogeneousGraph& g, std::vector<PreparedGroup> groups, PipelineOptions opts);

  ModelDims dims(std::size_t hidden, std::size_t attn_dim, std::size_t group_attn_dim) const;
};

struct ForwardOptions {
  bool training = true;           // false: dropout off
  std::uint64_t dropout_salt = 0; // non-zero re-keys every dropout mask
};

/// The recorded forward pass; everything backward() replays.
struct ForwardTape {
  std::uint64_t epoch_seed = 0;
  std::vector<BatchPlan> plans;                                  // [b]
  std::vector<std::vector<std::vector<BatchView>>> views;        // [i][b][k]
  std::vector<std::vector<std::vector<ViewEmbedding>>> encoded;  // [i][b][k]
  std::vector<std::vector<DenseMatrix>> aligned;                 // [i][b]
  std::vector<AttentionStage> group_stages;                      // [i]
  AttentionStage final_stage;
  MlpForward mlp;
  DiversityMatrix diversity;
  LossBreakdown loss;

  const DenseMatrix& final_embedding() const { return final_stage.fused; }
  const DenseMatrix& logits() const { return mlp.logits; }
};

/// Batch planning, view expansion and encoding, assembly, both fusion
/// stages, the MLP head, the diversity matrix and the total loss.
ForwardTape forward(const Pipeline& pipe, const ModelParams& params, std::uint64_t epoch_seed,
                    ForwardOptions fopts = {});

/// Exact reverse accumulation through the recorded tape. Per-view encoder
/// gradients are reduced in (group, batch size, batch index) order.
ParamGradients backward(const Pipeline& pipe, const ModelParams& params, const ForwardTape& tape);

/// Convenience: loss of a fresh forward pass.
double loss_at(const Pipeline& pipe, const ModelParams& params, std::uint64_t epoch_seed,
               ForwardOptions fopts = {});

}  // namespace hgens
