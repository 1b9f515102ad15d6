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
#include <span>
#include <vector>

#include "hgens/matrix.hpp"

namespace hgens {

enum class AttentionMode { kMinMax, kSoftmax };
enum class FusionMode { kAttention, kNaive };

/// Columns whose spread max - min falls below this are degenerate and
/// normalize to all zeros.
inline constexpr double kDegenerateSpread = 1e-12;

/// Projection and score weights of both fusion stages.
struct AttentionParams {
  std::vector<std::vector<DenseMatrix>> group_projections;  // [group][batch size]: d x d'
  std::vector<DenseMatrix> group_scores;                    // [group]: (m*d') x m
  std::vector<DenseMatrix> final_projections;               // [group]: d x d''
  DenseMatrix final_score;                                  // (c*d'') x c
};

/// Raw, centered and normalized attention for one fusion stage. Rows are
/// nodes, columns are sources.
struct AttentionTensors {
  DenseMatrix raw;         // Theta
  DenseMatrix mean;        // 1 x k column means
  DenseMatrix centered;    // Theta - mean
  DenseMatrix normalized;  // in [0, 1]
  std::vector<std::size_t> argmin;  // per column, first index on ties
  std::vector<std::size_t> argmax;
  std::vector<bool> degenerate;
};

/// Per column: subtract the column mean, then map [min, max] onto [0, 1].
AttentionTensors minmax_normalize(const DenseMatrix& theta);
/// Reverse rule; routes min/max gradients through the recorded indices and
/// includes the mean-subtraction Jacobian.
DenseMatrix minmax_backward(const AttentionTensors& t, const DenseMatrix& grad_normalized);

/// Row-wise softmax across sources (ablation variant).
DenseMatrix softmax_normalize(const DenseMatrix& theta);
DenseMatrix softmax_backward(const DenseMatrix& normalized, const DenseMatrix& grad_normalized);

/// Theta = (concat_j sources[j] * projections[j]) * score, evaluated blockwise.
/// `projected`, when given, receives sources[j] * projections[j].
DenseMatrix raw_attention(std::span<const DenseMatrix> sources,
                          std::span<const DenseMatrix> projections, const DenseMatrix& score,
                          std::vector<DenseMatrix>* projected = nullptr);

/// sum_j (weights[:, j] + 1/k) * sources[j], row-broadcast. `weights` may be
/// empty for plain averaging.
DenseMatrix fuse_residual(const DenseMatrix& weights, std::span<const DenseMatrix> sources);

/// Per-group fusion over batch sizes.
inline DenseMatrix fuse_group(const DenseMatrix& normalized, std::span<const DenseMatrix> views) {
  return fuse_residual(normalized, views);
}
/// Final fusion over relation groups.
inline DenseMatrix fuse_final(const DenseMatrix& normalized, std::span<const DenseMatrix> groups) {
  return fuse_residual(normalized, groups);
}

/// One residual-attention stage with its cached intermediates.
struct AttentionStage {
  std::vector<DenseMatrix> projected;
  AttentionTensors tensors;  // raw always set; minmax fields only in kMinMax
  DenseMatrix weights;       // normalized attention (empty for kNaive)
  DenseMatrix fused;
};

struct StageGrads {
  std::vector<DenseMatrix> projections;
  DenseMatrix score;
};

AttentionStage attention_forward(std::span<const DenseMatrix> sources,
                                 std::span<const DenseMatrix> projections,
                                 const DenseMatrix& score, AttentionMode mode, FusionMode fusion);

/// Returns dL/d sources and accumulates parameter gradients into `grads`.
std::vector<DenseMatrix> attention_backward(const AttentionStage& stage,
                                            std::span<const DenseMatrix> sources,
                                            std::span<const DenseMatrix> projections,
                                            const DenseMatrix& score, AttentionMode mode,
                                            FusionMode fusion, const DenseMatrix& grad_fused,
                                            StageGrads& grads);

}  // namespace hgens
