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

#include "hgens/fusion.hpp"

#include <cmath>

#include "hgens/error.hpp"
#include "hgens/kernels.hpp"

namespace hgens {

AttentionTensors minmax_normalize(const DenseMatrix& theta) {
  const std::size_t n = theta.rows();
  const std::size_t k = theta.cols();
  if (n == 0) throw ShapeError("minmax_normalize: no rows");
  AttentionTensors t;
  t.raw = theta;
  t.mean = DenseMatrix(1, k);
  t.centered = DenseMatrix(n, k);
  t.normalized = DenseMatrix(n, k);
  t.argmin.assign(k, 0);
  t.argmax.assign(k, 0);
  t.degenerate.assign(k, false);
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0;
    for (std::size_t v = 0; v < n; ++v) sum += theta(v, j);
    const double mean = sum / static_cast<double>(n);
    t.mean(0, j) = mean;
    std::size_t lo = 0, hi = 0;
    for (std::size_t v = 0; v < n; ++v) {
      t.centered(v, j) = theta(v, j) - mean;
      if (theta(v, j) < theta(lo, j)) lo = v;
      if (theta(v, j) > theta(hi, j)) hi = v;
    }
    t.argmin[j] = lo;
    t.argmax[j] = hi;
    // (c_v - c_lo) equals (theta_v - theta_lo) in exact arithmetic; the raw
    // difference keeps the result independent of how the mean rounds.
    const double spread = theta(hi, j) - theta(lo, j);
    if (!(spread >= kDegenerateSpread)) {
      t.degenerate[j] = true;
      continue;
    }
    for (std::size_t v = 0; v < n; ++v) {
      t.normalized(v, j) = (theta(v, j) - theta(lo, j)) / spread;
    }
  }
  return t;
}

DenseMatrix minmax_backward(const AttentionTensors& t, const DenseMatrix& grad) {
  const std::size_t n = t.raw.rows();
  const std::size_t k = t.raw.cols();
  DenseMatrix g_centered(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    if (t.degenerate[j]) continue;
    const std::size_t lo = t.argmin[j], hi = t.argmax[j];
    const double spread = t.raw(hi, j) - t.raw(lo, j);
    double to_min = 0.0, to_max = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      const double gv = grad(v, j);
      const double y = t.normalized(v, j);
      g_centered(v, j) += gv / spread;
      to_min += gv * (y - 1.0);
      to_max -= gv * y;
    }
    g_centered(lo, j) += to_min / spread;
    g_centered(hi, j) += to_max / spread;
  }
  // Through c = theta - mean(theta): g_theta = g_c - mean(g_c) per column.
  DenseMatrix g_raw(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0;
    for (std::size_t v = 0; v < n; ++v) sum += g_centered(v, j);
    const double mean = sum / static_cast<double>(n);
    for (std::size_t v = 0; v < n; ++v) g_raw(v, j) = g_centered(v, j) - mean;
  }
  return g_raw;
}

DenseMatrix softmax_normalize(const DenseMatrix& theta) { return softmax_rows(theta); }

DenseMatrix softmax_backward(const DenseMatrix& s, const DenseMatrix& grad) {
  DenseMatrix g(s.rows(), s.cols());
  for (std::size_t v = 0; v < s.rows(); ++v) {
    double dot = 0.0;
    for (std::size_t j = 0; j < s.cols(); ++j) dot += grad(v, j) * s(v, j);
    for (std::size_t j = 0; j < s.cols(); ++j) g(v, j) = s(v, j) * (grad(v, j) - dot);
  }
  return g;
}

DenseMatrix raw_attention(std::span<const DenseMatrix> sources,
                          std::span<const DenseMatrix> projections, const DenseMatrix& score,
                          std::vector<DenseMatrix>* projected) {
  const std::size_t k = sources.size();
  if (k == 0 || projections.size() != k) throw ShapeError("raw_attention: source count mismatch");
  const std::size_t n = sources.front().rows();
  const std::size_t dp = projections.front().cols();
  if (score.rows() != k * dp || score.cols() != k) {
    throw ShapeError("raw_attention: score weight " + score.shape_str() + " for " +
                     std::to_string(k) + " sources of width " + std::to_string(dp));
  }
  DenseMatrix theta(n, k);
  if (projected) projected->clear();
  for (std::size_t b = 0; b < k; ++b) {
    if (sources[b].rows() != n) {
      throw ShapeError("raw_attention: misaligned row counts " + std::to_string(sources[b].rows()) +
                       " vs " + std::to_string(n));
    }
    DenseMatrix p = matmul(sources[b], projections[b]);
    if (p.cols() != dp) throw ShapeError("raw_attention: projection widths differ");
    // Block b of the score weight: rows [b*dp, (b+1)*dp).
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t q = 0; q < dp; ++q) {
        const double pv = p(v, q);
        if (pv == 0.0) continue;
        for (std::size_t j = 0; j < k; ++j) theta(v, j) += pv * score(b * dp + q, j);
      }
    }
    if (projected) projected->push_back(std::move(p));
  }
  return theta;
}

DenseMatrix fuse_residual(const DenseMatrix& weights, std::span<const DenseMatrix> sources) {
  const std::size_t k = sources.size();
  if (k == 0) throw ShapeError("fuse: no sources");
  const std::size_t n = sources.front().rows();
  const std::size_t d = sources.front().cols();
  const bool plain = weights.empty();
  if (!plain && (weights.rows() != n || weights.cols() != k)) {
    throw ShapeError("fuse: weights " + weights.shape_str() + " for " + std::to_string(k) +
                     " sources of " + std::to_string(n) + " rows");
  }
  const double residual = 1.0 / static_cast<double>(k);
  DenseMatrix out(n, d);
  for (std::size_t j = 0; j < k; ++j) {
    if (!sources[j].same_shape(sources.front())) throw ShapeError("fuse: misaligned sources");
    for (std::size_t v = 0; v < n; ++v) {
      const double w = (plain ? 0.0 : weights(v, j)) + residual;
      for (std::size_t c = 0; c < d; ++c) out(v, c) += w * sources[j](v, c);
    }
  }
  return out;
}

AttentionStage attention_forward(std::span<const DenseMatrix> sources,
                                 std::span<const DenseMatrix> projections,
                                 const DenseMatrix& score, AttentionMode mode, FusionMode fusion) {
  AttentionStage s;
  if (fusion == FusionMode::kNaive) {
    s.fused = fuse_residual(DenseMatrix(), sources);
    return s;
  }
  DenseMatrix theta = raw_attention(sources, projections, score, &s.projected);
  if (mode == AttentionMode::kMinMax) {
    s.tensors = minmax_normalize(theta);
    s.weights = s.tensors.normalized;
  } else {
    s.weights = softmax_normalize(theta);
    s.tensors.raw = std::move(theta);
  }
  s.fused = fuse_residual(s.weights, sources);
  return s;
}

std::vector<DenseMatrix> attention_backward(const AttentionStage& stage,
                                            std::span<const DenseMatrix> sources,
                                            std::span<const DenseMatrix> projections,
                                            const DenseMatrix& score, AttentionMode mode,
                                            FusionMode fusion, const DenseMatrix& grad_fused,
                                            StageGrads& grads) {
  const std::size_t k = sources.size();
  const std::size_t n = grad_fused.rows();
  const std::size_t d = grad_fused.cols();
  const double residual = 1.0 / static_cast<double>(k);
  std::vector<DenseMatrix> g_src;
  g_src.reserve(k);
  if (fusion == FusionMode::kNaive) {
    for (std::size_t j = 0; j < k; ++j) {
      DenseMatrix g = grad_fused;
      g *= residual;
      g_src.push_back(std::move(g));
    }
    return g_src;
  }

  // Embedding branch and attention-weight branch of the residual sum.
  DenseMatrix g_weights(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    DenseMatrix g(n, d);
    for (std::size_t v = 0; v < n; ++v) {
      const double w = stage.weights(v, j) + residual;
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        g(v, c) = w * grad_fused(v, c);
        dot += grad_fused(v, c) * sources[j](v, c);
      }
      g_weights(v, j) = dot;
    }
    g_src.push_back(std::move(g));
  }

  const DenseMatrix g_theta = mode == AttentionMode::kMinMax
                                  ? minmax_backward(stage.tensors, g_weights)
                                  : softmax_backward(stage.weights, g_weights);

  const std::size_t dp = projections.front().cols();
  for (std::size_t b = 0; b < k; ++b) {
    const auto& p = stage.projected[b];
    DenseMatrix g_proj(n, dp);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t q = 0; q < dp; ++q) {
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          grads.score(b * dp + q, j) += p(v, q) * g_theta(v, j);
          acc += g_theta(v, j) * score(b * dp + q, j);
        }
        g_proj(v, q) = acc;
      }
    }
    matmul_tn_acc(sources[b], g_proj, grads.projections[b]);
    g_src[b] += matmul_nt(g_proj, projections[b]);
  }
  return g_src;
}

}  // namespace hgens
