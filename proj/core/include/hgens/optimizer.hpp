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

#include "hgens/model.hpp"

namespace hgens {

struct AdamConfig {
  double lr = 1e-3;
  double weight_decay = 0.0;  // decoupled: w -= lr * wd * w
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moments, one pair per parameter matrix in
/// for_each_param order.
struct AdamState {
  std::vector<DenseMatrix> m;
  std::vector<DenseMatrix> v;
  std::uint64_t step = 0;
};

AdamState adam_init(const ModelParams& params);

/// One bias-corrected Adam update. Throws ShapeError when grads or state do
/// not mirror params.
void adam_step(ModelParams& params, const ParamGradients& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace hgens
