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
#include <span>
#include <vector>

#include "hgens/graph.hpp"
#include "hgens/kernels.hpp"
#include "hgens/matrix.hpp"
#include "hgens/sampling.hpp"

namespace hgens {

/// Hidden-layer nonlinearity. kIdentity exists for linearity checks only.
enum class Activation { kRelu, kIdentity };

/// Learnable weights of one relation group's encoder.
struct EncoderParams {
  std::vector<DenseMatrix> input_weights;                  // per node type: feature_dim x d
  std::vector<std::vector<DenseMatrix>> relation_weights;  // [relation][layer]: d x d
};

/// Output of the input transform for one node type block.
struct InputBlock {
  NodeTypeId type = 0;
  std::vector<std::uint32_t> rows;  // rows of layer 0 belonging to this type
  DenseMatrix dropped;              // Dropout(X, p), rows x feature_dim
  DropoutMask mask;
};

/// Everything the reverse pass needs from one encode_view call.
struct ViewForward {
  std::vector<InputBlock> inputs;
  std::vector<DenseMatrix> activations;              // H^(l), l = 0..L
  std::vector<std::vector<DenseMatrix>> aggregated;  // [l][relation] = A~ H^(l)
};

struct ViewEmbedding {
  ViewKey key;
  DenseMatrix embedding;  // |batch| x d, rows in the view's target order
  ViewForward cache;
};

struct InputTransform {
  DenseMatrix activations;
  DenseMatrix dropped;
  DropoutMask mask;
};

/// H^(0) = sigma(Dropout(X, p) W).
InputTransform input_transform(const DenseMatrix& features, const DenseMatrix& weight, double p,
                               std::uint64_t seed, Activation act = Activation::kRelu);

/// One message-passing step over a view hop:
/// H^(l+1) = sigma(sum_j A~_j H^(l) W_j), relations summed in group order.
/// Carry rows copy their sender's state unchanged. `aggregated`, when given,
/// receives A~_j H^(l) per relation.
DenseMatrix relational_layer(const ViewHop& hop, const DenseMatrix& h,
                             std::span<const DenseMatrix> weights, Activation act,
                             std::vector<DenseMatrix>* aggregated = nullptr);

/// Input transform plus L relational layers; output restricted to the
/// batch targets.
ViewEmbedding encode_view(const HeterogeneousGraph& g, const BatchView& view,
                          const EncoderParams& params, double dropout, std::uint64_t dropout_seed,
                          Activation act = Activation::kRelu);

/// Reverse pass of encode_view. Accumulates into `grads` (shaped like params).
void encode_view_backward(const BatchView& view, const EncoderParams& params,
                          const ViewForward& cache, const DenseMatrix& grad_embedding,
                          EncoderParams& grads, Activation act = Activation::kRelu);

/// Places each view's rows at their canonical target positions. Throws
/// ValidationError unless every target appears exactly once.
DenseMatrix assemble_views(std::span<const ViewEmbedding> views,
                           std::span<const BatchView> batch_views, std::size_t num_targets);

/// Reverse of assemble_views: gathers each view's slice of `grad`.
std::vector<DenseMatrix> split_assembled_grad(const DenseMatrix& grad,
                                              std::span<const BatchView> batch_views);

EncoderParams zeros_like(const EncoderParams& p);

}  // namespace hgens
