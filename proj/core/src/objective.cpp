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

#include "hgens/objective.hpp"

#include <cmath>

#include "hgens/error.hpp"
#include "hgens/kernels.hpp"

namespace hgens {

MlpForward mlp_predict(const DenseMatrix& h, const MlpParams& p) {
  if (h.cols() != p.w1.rows()) {
    throw ShapeError("mlp_predict: input " + h.shape_str() + " vs W1 " + p.w1.shape_str());
  }
  MlpForward f;
  f.hidden = matmul(h, p.w1);
  add_row_bias(f.hidden, p.b1);
  relu_inplace(f.hidden);
  f.logits = matmul(f.hidden, p.w2);
  add_row_bias(f.logits, p.b2);
  return f;
}

DenseMatrix mlp_backward(const DenseMatrix& h, const MlpParams& p, const MlpForward& fwd,
                         const DenseMatrix& grad_logits, MlpParams& grads) {
  matmul_tn_acc(fwd.hidden, grad_logits, grads.w2);
  column_sums_acc(grad_logits, grads.b2);
  DenseMatrix g_hidden = relu_backward(matmul_nt(grad_logits, p.w2), fwd.hidden);
  matmul_tn_acc(h, g_hidden, grads.w1);
  column_sums_acc(g_hidden, grads.b1);
  return matmul_nt(g_hidden, p.w1);
}

DiversityMatrix diversity_matrix(std::span<const DenseMatrix> views) {
  if (views.empty()) throw ShapeError("diversity_matrix: no views");
  DiversityMatrix dm;
  dm.pooled = DenseMatrix(views.size(), views.front().cols());
  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto row = mean_pool_rows(views[v]);
    if (row.cols() != dm.pooled.cols()) throw ShapeError("diversity_matrix: widths differ");
    std::copy(row.data().begin(), row.data().end(), dm.pooled.row(v).begin());
  }
  dm.gram = matmul_nt(dm.pooled, dm.pooled);
  return dm;
}

double diversity_penalty(const DiversityMatrix& dm, bool exclude_diagonal) {
  if (!exclude_diagonal) return elementwise_l1(dm.gram);
  double acc = 0.0;
  for (std::size_t i = 0; i < dm.gram.rows(); ++i) {
    for (std::size_t j = 0; j < dm.gram.cols(); ++j) {
      if (i != j) acc += std::abs(dm.gram(i, j));
    }
  }
  return acc;
}

std::vector<DenseMatrix> diversity_backward(const DiversityMatrix& dm,
                                            std::span<const DenseMatrix> views, double scale,
                                            bool exclude_diagonal) {
  DenseMatrix sign = elementwise_l1_backward(dm.gram);
  if (exclude_diagonal) {
    for (std::size_t i = 0; i < sign.rows(); ++i) sign(i, i) = 0.0;
  }
  // d||P P^T||_1 / dP = (G + G^T) P with G = sign(S).
  DenseMatrix sym(sign.rows(), sign.cols());
  for (std::size_t i = 0; i < sign.rows(); ++i) {
    for (std::size_t j = 0; j < sign.cols(); ++j) sym(i, j) = scale * (sign(i, j) + sign(j, i));
  }
  const DenseMatrix g_pooled = matmul(sym, dm.pooled);
  std::vector<DenseMatrix> out;
  out.reserve(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) {
    DenseMatrix row(1, g_pooled.cols());
    std::copy(g_pooled.row(v).begin(), g_pooled.row(v).end(), row.data().begin());
    out.push_back(mean_pool_backward(row, views[v].rows()));
  }
  return out;
}

namespace {

void check_rows(const DenseMatrix& logits, std::span<const int> labels,
                std::span<const std::uint32_t> rows, const char* op) {
  if (rows.empty()) throw ValidationError(std::string(op) + ": empty mask");
  for (auto r : rows) {
    if (r >= logits.rows() || r >= labels.size()) {
      throw ShapeError(std::string(op) + ": row " + std::to_string(r) + " out of range");
    }
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= logits.cols()) {
      throw ValidationError(std::string(op) + ": label out of range at row " + std::to_string(r));
    }
  }
}

double log_sum_exp(std::span<const double> x) {
  double mx = -INFINITY;
  for (double v : x) mx = std::max(mx, v);
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

}  // namespace

double cross_entropy(const DenseMatrix& logits, std::span<const int> labels,
                     std::span<const std::uint32_t> rows) {
  check_rows(logits, labels, rows, "cross_entropy");
  double acc = 0.0;
  for (auto r : rows) acc += log_sum_exp(logits.row(r)) - logits(r, labels[r]);
  return acc / static_cast<double>(rows.size());
}

DenseMatrix cross_entropy_backward(const DenseMatrix& logits, std::span<const int> labels,
                                   std::span<const std::uint32_t> rows) {
  check_rows(logits, labels, rows, "cross_entropy_backward");
  DenseMatrix g(logits.rows(), logits.cols());
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (auto r : rows) {
    const double lse = log_sum_exp(logits.row(r));
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      g(r, c) += std::exp(logits(r, c) - lse) * inv;
    }
    g(r, labels[r]) -= inv;
  }
  return g;
}

LossBreakdown total_loss(const DenseMatrix& logits, std::span<const int> labels,
                         std::span<const std::uint32_t> train_rows, const DiversityMatrix& dm,
                         double lambda, bool exclude_diagonal) {
  LossBreakdown lb;
  lb.cross_entropy = cross_entropy(logits, labels, train_rows);
  lb.diversity = diversity_penalty(dm, exclude_diagonal);
  lb.lambda = lambda;
  lb.total = lb.cross_entropy + lambda * lb.diversity;
  return lb;
}

double evaluate(const DenseMatrix& logits, std::span<const int> labels,
                std::span<const std::uint32_t> rows) {
  check_rows(logits, labels, rows, "evaluate");
  std::size_t correct = 0;
  for (auto r : rows) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.cols(); ++c) {
      if (logits(r, c) > logits(r, best)) best = c;
    }
    if (static_cast<int>(best) == labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace hgens
