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

#include "hgens/matrix.hpp"

namespace hgens {

struct MlpParams {
  DenseMatrix w1;  // d x d
  DenseMatrix b1;  // 1 x d
  DenseMatrix w2;  // d x C
  DenseMatrix b2;  // 1 x C
};

struct MlpForward {
  DenseMatrix hidden;  // ReLU(H W1 + b1)
  DenseMatrix logits;
};

/// ReLU(H W1 + b1) W2 + b2.
MlpForward mlp_predict(const DenseMatrix& h, const MlpParams& p);
/// Returns dL/dH; accumulates parameter gradients into `grads`.
DenseMatrix mlp_backward(const DenseMatrix& h, const MlpParams& p, const MlpForward& fwd,
                         const DenseMatrix& grad_logits, MlpParams& grads);

/// Mean-pooled view embeddings stacked as rows (group-major, batch-size
/// minor) and their Gram matrix.
struct DiversityMatrix {
  DenseMatrix pooled;  // (c*m) x d
  DenseMatrix gram;    // pooled * pooled^T
};

DiversityMatrix diversity_matrix(std::span<const DenseMatrix> view_embeddings);

/// ||S||_1, optionally skipping the diagonal.
double diversity_penalty(const DiversityMatrix& dm, bool exclude_diagonal);

/// Gradient of scale * ||S||_1 w.r.t. each view embedding.
std::vector<DenseMatrix> diversity_backward(const DiversityMatrix& dm,
                                            std::span<const DenseMatrix> view_embeddings,
                                            double scale, bool exclude_diagonal);

struct LossBreakdown {
  double cross_entropy = 0.0;
  double diversity = 0.0;
  double lambda = 0.0;
  double total = 0.0;
};

/// Mean softmax cross-entropy over `rows`. Throws ValidationError when
/// `rows` is empty.
double cross_entropy(const DenseMatrix& logits, std::span<const int> labels,
                     std::span<const std::uint32_t> rows);
DenseMatrix cross_entropy_backward(const DenseMatrix& logits, std::span<const int> labels,
                                   std::span<const std::uint32_t> rows);

/// cross_entropy + lambda * ||S||_1.
LossBreakdown total_loss(const DenseMatrix& logits, std::span<const int> labels,
                         std::span<const std::uint32_t> train_rows, const DiversityMatrix& dm,
                         double lambda, bool exclude_diagonal = false);

/// Argmax accuracy over `rows`, first index wins ties.
double evaluate(const DenseMatrix& logits, std::span<const int> labels,
                std::span<const std::uint32_t> rows);

}  // namespace hgens
