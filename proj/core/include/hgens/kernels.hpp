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
#include <utility>

#include "hgens/matrix.hpp"
#include "hgens/sparse.hpp"

namespace hgens {

// Deterministic kernel set. Every accumulation runs left to right in index
// order, so identical inputs give bitwise-identical outputs. Each forward
// kernel has a matching reverse rule (suffix _backward or the transposed
// product it needs).

/// A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// A^T * B
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// A * B^T
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
/// out += A^T * B (accumulating form of matmul_tn, for weight gradients)
void matmul_tn_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);

/// Row-gather product A * H.
DenseMatrix sparse_dense_multiply(const NormalizedAdjacency& a, const DenseMatrix& h);
/// out += A^T * G; the reverse rule of sparse_dense_multiply w.r.t. H.
void sparse_transpose_multiply_acc(const NormalizedAdjacency& a, const DenseMatrix& g,
                                   DenseMatrix& out);

DenseMatrix relu(const DenseMatrix& x);
void relu_inplace(DenseMatrix& x);
/// Gradient through ReLU given its output; the subgradient at 0 is 0.
DenseMatrix relu_backward(const DenseMatrix& grad_out, const DenseMatrix& out);

struct DropoutMask {
  DenseMatrix mask;  // entries are 0 or 1
  double keep_prob = 1.0;
  std::uint64_t seed = 0;
};

/// Inverted dropout: mask * X / (1 - p). Throws ValidationError for p
/// outside [0, 1).
std::pair<DenseMatrix, DropoutMask> apply_dropout(const DenseMatrix& x, double p,
                                                  std::uint64_t seed);
DenseMatrix dropout_backward(const DenseMatrix& grad_out, const DropoutMask& mask);

/// Column means as a 1 x cols matrix. Throws on an empty matrix.
DenseMatrix mean_pool_rows(const DenseMatrix& h);
/// Spreads a 1 x cols gradient back over `rows` rows.
DenseMatrix mean_pool_backward(const DenseMatrix& grad_row, std::size_t rows);

/// Sum of absolute values.
double elementwise_l1(const DenseMatrix& s);
/// sign(S) with sign(0) = 0.
DenseMatrix elementwise_l1_backward(const DenseMatrix& s);

/// Adds a 1 x cols bias to every row.
void add_row_bias(DenseMatrix& x, const DenseMatrix& bias);
/// Column sums of G accumulated into a 1 x cols matrix.
void column_sums_acc(const DenseMatrix& g, DenseMatrix& out);

/// Row-wise softmax.
DenseMatrix softmax_rows(const DenseMatrix& x);

}  // namespace hgens
