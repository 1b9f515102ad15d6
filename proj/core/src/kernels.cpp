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

#include "hgens/kernels.hpp"

#include <cmath>

#include "hgens/error.hpp"
#include "hgens/rng.hpp"

namespace hgens {

namespace {

void require(bool ok, const char* op, const DenseMatrix& a, const DenseMatrix& b) {
  if (!ok) throw ShapeError(std::string(op) + ": " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul", a, b);
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* o = out.data().data() + i * n;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* br = b.data().data() + k * n;
      for (std::size_t j = 0; j < n; ++j) o[j] += aik * br[j];
    }
  }
  return out;
}

void matmul_tn_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  require(a.rows() == b.rows(), "matmul_tn", a, b);
  if (out.rows() != a.cols() || out.cols() != b.cols()) {
    throw ShapeError("matmul_tn_acc: output " + out.shape_str());
  }
  const std::size_t n = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* br = b.data().data() + r * n;
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ari = a(r, i);
      if (ari == 0.0) continue;
      double* o = out.data().data() + i * n;
      for (std::size_t j = 0; j < n; ++j) o[j] += ari * br[j];
    }
  }
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.cols(), b.cols());
  matmul_tn_acc(a, b, out);
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), "matmul_nt", a, b);
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ar = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto br = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += ar[k] * br[k];
      out(i, j) = s;
    }
  }
  return out;
}

DenseMatrix sparse_dense_multiply(const NormalizedAdjacency& a, const DenseMatrix& h) {
  if (a.cols != h.rows()) {
    throw ShapeError("sparse_dense_multiply: adjacency has " + std::to_string(a.cols) +
                     " columns, features " + h.shape_str());
  }
  DenseMatrix out(a.rows, h.cols());
  const std::size_t d = h.cols();
  for (std::size_t r = 0; r < a.rows; ++r) {
    double* o = out.data().data() + r * d;
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      const double w = a.values[p];
      const double* hr = h.data().data() + static_cast<std::size_t>(a.col_idx[p]) * d;
      for (std::size_t j = 0; j < d; ++j) o[j] += w * hr[j];
    }
  }
  return out;
}

void sparse_transpose_multiply_acc(const NormalizedAdjacency& a, const DenseMatrix& g,
                                   DenseMatrix& out) {
  if (a.rows != g.rows() || a.cols != out.rows() || g.cols() != out.cols()) {
    throw ShapeError("sparse_transpose_multiply: shape mismatch");
  }
  const std::size_t d = g.cols();
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* gr = g.data().data() + r * d;
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      const double w = a.values[p];
      double* o = out.data().data() + static_cast<std::size_t>(a.col_idx[p]) * d;
      for (std::size_t j = 0; j < d; ++j) o[j] += w * gr[j];
    }
  }
}

DenseMatrix relu(const DenseMatrix& x) {
  DenseMatrix out = x;
  relu_inplace(out);
  return out;
}

void relu_inplace(DenseMatrix& x) {
  for (auto& v : x.data()) v = v > 0.0 ? v : 0.0;
}

DenseMatrix relu_backward(const DenseMatrix& grad_out, const DenseMatrix& out) {
  require(grad_out.same_shape(out), "relu_backward", grad_out, out);
  DenseMatrix g(out.rows(), out.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    g.data()[i] = out.data()[i] > 0.0 ? grad_out.data()[i] : 0.0;
  }
  return g;
}

std::pair<DenseMatrix, DropoutMask> apply_dropout(const DenseMatrix& x, double p,
                                                  std::uint64_t seed) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ValidationError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
  DropoutMask m{DenseMatrix(x.rows(), x.cols(), 1.0), 1.0 - p, seed};
  DenseMatrix out = x;
  if (p == 0.0) return {std::move(out), std::move(m)};
  Rng rng(seed);
  const double scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (uniform01(rng) < p) {
      m.mask.data()[i] = 0.0;
      out.data()[i] = 0.0;
    } else {
      out.data()[i] *= scale;
    }
  }
  return {std::move(out), std::move(m)};
}

DenseMatrix dropout_backward(const DenseMatrix& grad_out, const DropoutMask& mask) {
  require(grad_out.same_shape(mask.mask), "dropout_backward", grad_out, mask.mask);
  DenseMatrix g(grad_out.rows(), grad_out.cols());
  const double scale = 1.0 / mask.keep_prob;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.data()[i] = mask.mask.data()[i] != 0.0 ? grad_out.data()[i] * scale : 0.0;
  }
  return g;
}

DenseMatrix mean_pool_rows(const DenseMatrix& h) {
  if (h.rows() == 0) throw ShapeError("mean_pool_rows: empty matrix");
  DenseMatrix out(1, h.cols());
  for (std::size_t r = 0; r < h.rows(); ++r) {
    for (std::size_t c = 0; c < h.cols(); ++c) out(0, c) += h(r, c);
  }
  const double inv = 1.0 / static_cast<double>(h.rows());
  for (auto& v : out.data()) v *= inv;
  return out;
}

DenseMatrix mean_pool_backward(const DenseMatrix& grad_row, std::size_t rows) {
  DenseMatrix g(rows, grad_row.cols());
  const double inv = 1.0 / static_cast<double>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) = grad_row(0, c) * inv;
  }
  return g;
}

double elementwise_l1(const DenseMatrix& s) {
  double acc = 0.0;
  for (double v : s.data()) acc += std::abs(v);
  return acc;
}

DenseMatrix elementwise_l1_backward(const DenseMatrix& s) {
  DenseMatrix g(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = s.data()[i];
    g.data()[i] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  }
  return g;
}

void add_row_bias(DenseMatrix& x, const DenseMatrix& bias) {
  require(bias.rows() == 1 && bias.cols() == x.cols(), "add_row_bias", x, bias);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) += bias(0, c);
  }
}

void column_sums_acc(const DenseMatrix& g, DenseMatrix& out) {
  require(out.rows() == 1 && out.cols() == g.cols(), "column_sums", g, out);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) out(0, c) += g(r, c);
  }
}

DenseMatrix softmax_rows(const DenseMatrix& x) {
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto xr = x.row(r);
    double mx = -INFINITY;
    for (double v : xr) mx = std::max(mx, v);
    double z = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out(r, c) = std::exp(xr[c] - mx);
      z += out(r, c);
    }
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) /= z;
  }
  return out;
}

}  // namespace hgens
