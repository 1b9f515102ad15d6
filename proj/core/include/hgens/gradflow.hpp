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

#include "hgens/matrix.hpp"

namespace hgens {

/// Single-node residual attention over k sources:
///   theta = concat_i(h_i W_i) W',  theta~ = minmax over the k entries,
///   h_f = sum_i (theta~_i + r) h_i,  r = 1/k with the residual, else 0.
struct FlowInputs {
  std::vector<std::vector<double>> h;  // k vectors of length d
  std::vector<DenseMatrix> w;          // k matrices d x d'
  DenseMatrix score;                   // (k*d') x k, block (i, j) = W'_ij
};

struct FlowForward {
  std::vector<double> theta;       // raw, after optional mean subtraction
  std::vector<double> normalized;  // theta~
  std::size_t lo = 0;              // first index of the minimum
  std::size_t hi = 0;              // first index of the maximum
  double spread = 0.0;
  bool degenerate = false;
  std::vector<double> fused;  // h_f
};

std::size_t flow_sources(const FlowInputs& in);
/// Throws ShapeError on inconsistent shapes.
void check_flow_inputs(const FlowInputs& in);

FlowForward flow_forward(const FlowInputs& in, bool with_residual, bool subtract_mean = false);

/// d x d Jacobians d h_f / d h_i for every source i, J(a, b) = d h_f[a] / d h_i[b].
/// Throws StructureError when k >= 2 and the raw spread is degenerate; with
/// k = 1 the single column normalizes to 0.
std::vector<DenseMatrix> intermediate_gradient(const FlowInputs& in, bool with_residual,
                                               bool subtract_mean = false);

/// Largest singular value.
double spectral_norm(const DenseMatrix& m);

struct GradFlowReport {
  std::size_t k = 0;
  double spread = 0.0;  // theta_max - theta_min
  std::vector<double> theta;
  std::vector<double> normalized;
  std::vector<double> norm_with;     // spectral norm per source, residual on
  std::vector<double> norm_without;  // residual off
  std::vector<double> second_term;   // norm of the score-Jacobian term alone
  std::size_t min_source = 0;
};

GradFlowReport analyze_flow(const FlowInputs& in, bool subtract_mean = false);

/// Bounded h_j (unit vectors), W_i = I, and bounded W'_0j for source 0; the
/// remaining W' entries place theta_l = l * spread / (k - 1), so source 0
/// has the minimum raw attention. Requires k >= 2, spread > 0, d >= 2.
FlowInputs vanishing_inputs(std::size_t k, double spread, std::size_t d = 2);
GradFlowReport vanishing_scenario(std::size_t k, double spread, std::size_t d = 2);

/// Standard-normal entries from a seeded stream.
FlowInputs random_flow_inputs(std::size_t k, std::size_t d, std::size_t dp, std::uint64_t seed);

}  // namespace hgens
