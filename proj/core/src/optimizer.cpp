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

#include "hgens/optimizer.hpp"

#include <cmath>

#include "hgens/error.hpp"

namespace hgens {

AdamState adam_init(const ModelParams& params) {
  AdamState s;
  for_each_param(params, [&](const std::string&, const DenseMatrix& w) {
    s.m.emplace_back(w.rows(), w.cols());
    s.v.emplace_back(w.rows(), w.cols());
  });
  return s;
}

void adam_step(ModelParams& params, const ParamGradients& grads, AdamState& state,
               const AdamConfig& cfg) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  std::size_t idx = 0;
  for_each_param_pair(params, grads, [&](const std::string& name, DenseMatrix& w, const DenseMatrix& g) {
    if (idx >= state.m.size() || !state.m[idx].same_shape(w)) {
      throw ShapeError("adam: state does not match parameter '" + name + "'");
    }
    auto& m = state.m[idx];
    auto& v = state.v[idx];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g.data()[i];
      m.data()[i] = cfg.beta1 * m.data()[i] + (1.0 - cfg.beta1) * gi;
      v.data()[i] = cfg.beta2 * v.data()[i] + (1.0 - cfg.beta2) * gi * gi;
      const double mhat = m.data()[i] / c1;
      const double vhat = v.data()[i] / c2;
      w.data()[i] -= cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * w.data()[i]);
    }
    ++idx;
  });
  if (idx != state.m.size()) throw ShapeError("adam: state has extra entries");
}

}  // namespace hgens
