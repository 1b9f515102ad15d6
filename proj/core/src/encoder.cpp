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

#include "hgens/encoder.hpp"

#include "hgens/error.hpp"
#include "hgens/rng.hpp"

namespace hgens {

namespace {

void activate(DenseMatrix& x, Activation act) {
  if (act == Activation::kRelu) relu_inplace(x);
}

DenseMatrix activation_backward(const DenseMatrix& grad, const DenseMatrix& out, Activation act) {
  return act == Activation::kRelu ? relu_backward(grad, out) : grad;
}

}  // namespace

InputTransform input_transform(const DenseMatrix& features, const DenseMatrix& weight, double p,
                               std::uint64_t seed, Activation act) {
  if (features.cols() != weight.rows()) {
    throw ShapeError("input_transform: features " + features.shape_str() + " vs weight " +
                     weight.shape_str());
  }
  auto [dropped, mask] = apply_dropout(features, p, seed);
  InputTransform out{matmul(dropped, weight), std::move(dropped), std::move(mask)};
  activate(out.activations, act);
  return out;
}

DenseMatrix relational_layer(const ViewHop& hop, const DenseMatrix& h,
                             std::span<const DenseMatrix> weights, Activation act,
                             std::vector<DenseMatrix>* aggregated) {
  if (hop.normalized.size() != weights.size()) {
    throw StructureError("relational_layer: " + std::to_string(weights.size()) +
                         " relation weights for " + std::to_string(hop.normalized.size()) +
                         " adjacencies");
  }
  if (weights.empty()) throw StructureError("relational_layer: no relations");
  const std::size_t rows = hop.normalized.front().rows;
  DenseMatrix pre(rows, weights.front().cols());
  if (aggregated) aggregated->clear();
  for (std::size_t j = 0; j < weights.size(); ++j) {
    DenseMatrix m = sparse_dense_multiply(hop.normalized[j], h);
    pre += matmul(m, weights[j]);
    if (aggregated) aggregated->push_back(std::move(m));
  }
  activate(pre, act);
  for (const auto& [row, src] : hop.carry) {
    auto dst = pre.row(row);
    auto from = h.row(src);
    std::copy(from.begin(), from.end(), dst.begin());
  }
  return pre;
}

ViewEmbedding encode_view(const HeterogeneousGraph& g, const BatchView& view,
                          const EncoderParams& params, double dropout, std::uint64_t dropout_seed,
                          Activation act) {
  const std::size_t L = view.num_hops();
  if (params.input_weights.size() != g.node_types.size()) {
    throw ShapeError("encode_view: input weights do not match node types");
  }
  const std::size_t d = params.input_weights.front().cols();
  ViewEmbedding out;
  out.key = view.key;
  auto& cache = out.cache;

  // Input transform, one block per node type present at layer 0.
  const auto& base = view.layer_nodes[0];
  DenseMatrix h0(base.size(), d);
  for (NodeTypeId t = 0; t < g.node_types.size(); ++t) {
    InputBlock block;
    block.type = t;
    for (std::uint32_t r = 0; r < base.size(); ++r) {
      if (base[r].type == t) block.rows.push_back(r);
    }
    if (block.rows.empty()) continue;
    const auto& feats = g.node_types[t].features;
    DenseMatrix x(block.rows.size(), feats.cols());
    for (std::size_t i = 0; i < block.rows.size(); ++i) {
      auto src = feats.row(base[block.rows[i]].id);
      std::copy(src.begin(), src.end(), x.row(i).begin());
    }
    auto it = input_transform(x, params.input_weights[t], dropout,
                              derive_seed(dropout_seed, {t}), act);
    for (std::size_t i = 0; i < block.rows.size(); ++i) {
      auto src = it.activations.row(i);
      std::copy(src.begin(), src.end(), h0.row(block.rows[i]).begin());
    }
    block.dropped = std::move(it.dropped);
    block.mask = std::move(it.mask);
    cache.inputs.push_back(std::move(block));
  }
  cache.activations.push_back(std::move(h0));

  std::vector<DenseMatrix> layer_weights;
  cache.aggregated.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    layer_weights.clear();
    for (const auto& per_rel : params.relation_weights) layer_weights.push_back(per_rel.at(l));
    cache.activations.push_back(relational_layer(view.hops[l], cache.activations[l], layer_weights,
                                                 act, &cache.aggregated[l]));
  }
  out.embedding = cache.activations[L];
  return out;
}

void encode_view_backward(const BatchView& view, const EncoderParams& params,
                          const ViewForward& cache, const DenseMatrix& grad_embedding,
                          EncoderParams& grads, Activation act) {
  const std::size_t L = view.num_hops();
  DenseMatrix grad = grad_embedding;
  for (std::size_t l = L; l-- > 0;) {
    const auto& hop = view.hops[l];
    const auto& h_in = cache.activations[l];
    DenseMatrix grad_pre = activation_backward(grad, cache.activations[l + 1], act);
    DenseMatrix grad_in(h_in.rows(), h_in.cols());
    for (const auto& [row, src] : hop.carry) {
      for (std::size_t c = 0; c < grad.cols(); ++c) {
        grad_in(src, c) += grad(row, c);
        grad_pre(row, c) = 0.0;
      }
    }
    for (std::size_t j = 0; j < hop.normalized.size(); ++j) {
      const auto& w = params.relation_weights[j][l];
      matmul_tn_acc(cache.aggregated[l][j], grad_pre, grads.relation_weights[j][l]);
      sparse_transpose_multiply_acc(hop.normalized[j], matmul_nt(grad_pre, w), grad_in);
    }
    grad = std::move(grad_in);
  }
  // grad now holds dL/dH^(0).
  const auto& h0 = cache.activations[0];
  for (const auto& block : cache.inputs) {
    DenseMatrix g_out(block.rows.size(), h0.cols());
    DenseMatrix out(block.rows.size(), h0.cols());
    for (std::size_t i = 0; i < block.rows.size(); ++i) {
      for (std::size_t c = 0; c < h0.cols(); ++c) {
        g_out(i, c) = grad(block.rows[i], c);
        out(i, c) = h0(block.rows[i], c);
      }
    }
    matmul_tn_acc(block.dropped, activation_backward(g_out, out, act),
                  grads.input_weights[block.type]);
  }
}

DenseMatrix assemble_views(std::span<const ViewEmbedding> views,
                           std::span<const BatchView> batch_views, std::size_t num_targets) {
  if (views.size() != batch_views.size() || views.empty()) {
    throw ValidationError("assemble_views: view count mismatch");
  }
  const std::size_t d = views.front().embedding.cols();
  DenseMatrix out(num_targets, d);
  std::vector<bool> seen(num_targets, false);
  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto& ids = batch_views[v].target_ids;
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (ids[r] >= num_targets || seen[ids[r]]) {
        throw ValidationError("assemble_views: target " + std::to_string(ids[r]) +
                              " placed twice or out of range");
      }
      seen[ids[r]] = true;
      auto src = views[v].embedding.row(r);
      std::copy(src.begin(), src.end(), out.row(ids[r]).begin());
    }
  }
  for (std::size_t i = 0; i < num_targets; ++i) {
    if (!seen[i]) throw ValidationError("assemble_views: coverage gap at target " + std::to_string(i));
  }
  return out;
}

std::vector<DenseMatrix> split_assembled_grad(const DenseMatrix& grad,
                                              std::span<const BatchView> batch_views) {
  std::vector<DenseMatrix> out;
  out.reserve(batch_views.size());
  for (const auto& bv : batch_views) {
    DenseMatrix g(bv.target_ids.size(), grad.cols());
    for (std::size_t r = 0; r < bv.target_ids.size(); ++r) {
      auto src = grad.row(bv.target_ids[r]);
      std::copy(src.begin(), src.end(), g.row(r).begin());
    }
    out.push_back(std::move(g));
  }
  return out;
}

EncoderParams zeros_like(const EncoderParams& p) {
  EncoderParams z;
  for (const auto& w : p.input_weights) z.input_weights.emplace_back(w.rows(), w.cols());
  for (const auto& per_rel : p.relation_weights) {
    auto& dst = z.relation_weights.emplace_back();
    for (const auto& w : per_rel) dst.emplace_back(w.rows(), w.cols());
  }
  return z;
}

}  // namespace hgens
