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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hgens/encoder.hpp"
#include "hgens/fusion.hpp"
#include "hgens/objective.hpp"

namespace hgens {

struct ModelDims {
  std::size_t hidden = 64;
  std::size_t num_layers = 2;
  std::size_t attn_dim = 16;        // d'
  std::size_t group_attn_dim = 16;  // d''
  std::size_t num_classes = 2;
  std::size_t num_batch_sizes = 1;
  std::vector<std::size_t> feature_dims;         // per node type
  std::vector<std::size_t> relations_per_group;  // one entry per group
};

/// Every learnable matrix. Gradients use the same type.
struct ModelParams {
  std::vector<EncoderParams> encoders;  // one per relation group
  AttentionParams attention;
  MlpParams mlp;
};

using ParamGradients = ModelParams;

/// Glorot-uniform weights, zero biases, all drawn from one seeded stream.
ModelParams init_params(const ModelDims& dims, std::uint64_t seed);

ModelParams zeros_like(const ModelParams& p);

/// Visits every parameter in a fixed order with a stable name.
void for_each_param(ModelParams& p, const std::function<void(const std::string&, DenseMatrix&)>& fn);
void for_each_param(const ModelParams& p,
                    const std::function<void(const std::string&, const DenseMatrix&)>& fn);

/// Visits matching parameters of two identically shaped models.
void for_each_param_pair(
    ModelParams& a, const ModelParams& b,
    const std::function<void(const std::string&, DenseMatrix&, const DenseMatrix&)>& fn);

std::size_t parameter_count(const ModelParams& p);

/// Binary snapshot: "LHGE", u32 version, u32 count, then per matrix
/// u32 name length, name bytes, u64 rows, u64 cols, rows*cols f64, all
/// little-endian.
void save_params(const std::filesystem::path& file, const ModelParams& p);

/// Reads a snapshot into `p`, which supplies the expected names and shapes.
void load_params(const std::filesystem::path& file, ModelParams& p);

inline constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace hgens
