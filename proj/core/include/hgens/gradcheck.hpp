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
#include <memory>
#include <string>
#include <vector>

#include "hgens/config.hpp"
#include "hgens/pipeline.hpp"

namespace hgens {

struct GradCheckOptions {
  double eps = 1e-5;
  double tol = 1e-4;
  /// false re-draws every dropout mask per loss evaluation (negative control).
  bool freeze_dropout = true;
  /// Minimum gap between a column's extreme and its runner-up, and minimum
  /// column spread, required at the base point.
  double min_margin = 1e-4;
};

struct ParamCheck {
  std::string name;
  std::size_t count = 0;
  double max_rel_err = 0.0;
  std::size_t row = 0;  // location of the worst entry
  std::size_t col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct FiniteDiffReport {
  std::uint64_t seed = 0;
  double eps = 0.0;
  double tol = 0.0;
  std::size_t num_scalars = 0;
  double max_rel_err = 0.0;
  std::string worst_param;
  std::vector<ParamCheck> params;
  bool pass = false;
};

/// Smallest extreme-vs-runner-up gap and spread over every attention column
/// of the tape; +inf when no min-max stage exists.
double attention_margin(const ForwardTape& tape);

/// Central differences (L(w + eps) - L(w - eps)) / (2 eps) for every scalar
/// parameter, compared against backward(). Relative error is
/// |analytic - numeric| / max(1e-8, |numeric|). Throws StructureError when
/// an attention column is degenerate or nearly tied at the base point; the
/// caller should reseed.
FiniteDiffReport finite_diff_check(const Pipeline& pipe, const ModelParams& params,
                                   std::uint64_t epoch_seed, const GradCheckOptions& opts);

/// The gradient-check model: d = 8, d' = d'' = 4, two relation groups, two
/// batch sizes, 36 targets, dropout 0.1, lambda 0.05, fanout cap 3.
struct TinyProblem {
  std::unique_ptr<HeterogeneousGraph> graph;
  TrainConfig config;
  std::unique_ptr<Pipeline> pipe;
  ModelParams params;
};

TinyProblem make_tiny_problem(std::uint64_t seed);

/// make_tiny_problem + finite_diff_check at the first training epoch's seed.
FiniteDiffReport run_gradcheck(std::uint64_t seed, const GradCheckOptions& opts);

}  // namespace hgens
