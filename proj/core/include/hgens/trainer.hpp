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
#include <functional>
#include <string>
#include <vector>

#include "hgens/config.hpp"
#include "hgens/model.hpp"
#include "hgens/pipeline.hpp"

namespace hgens {

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double ce = 0.0;
  double diversity = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
};

struct RunArtifacts {
  TrainConfig config;
  ModelParams best;
  std::size_t best_epoch = 0;
  double best_val_acc = -1.0;
  double test_acc = 0.0;  // of the restored snapshot
  std::vector<EpochMetrics> metrics;
};

struct TrainHooks {
  std::function<void(const EpochMetrics&)> on_epoch;
};

/// Builds the pipeline a config describes on `g`.
Pipeline make_pipeline(const TrainConfig& c, const HeterogeneousGraph& g,
                       std::vector<PreparedGroup> groups);
Pipeline make_pipeline(const TrainConfig& c, const HeterogeneousGraph& g);

ModelParams init_model(const TrainConfig& c, const Pipeline& pipe);

/// Per-epoch training seed; all epoch randomness derives from it.
std::uint64_t epoch_seed(const TrainConfig& c, std::size_t epoch);

/// Full training loop with early stopping on validation accuracy (strict
/// improvement, earliest epoch wins ties). Throws DivergenceError on a
/// non-finite loss.
RunArtifacts train(const TrainConfig& c, const HeterogeneousGraph& g, const TrainHooks& hooks = {});
RunArtifacts train(const TrainConfig& c, const HeterogeneousGraph& g,
                   std::vector<PreparedGroup> groups, const TrainHooks& hooks = {});

/// Eval-mode logits: dropout off, batch plans drawn from c.eval_seed.
DenseMatrix predict(const Pipeline& pipe, const ModelParams& params, std::uint64_t eval_seed);

/// Accuracy on one split. Throws ValidationError when the split is empty.
double evaluate_run(const ModelParams& params, const TrainConfig& c, const HeterogeneousGraph& g,
                    Split split);
double evaluate_run(const ModelParams& params, const TrainConfig& c, const Pipeline& pipe,
                    Split split);

// ---------------------------------------------------------------------------
// Ablations

enum class AblationKind { kFull, kSoftmax, kMinMaxNoReg, kNaiveWeighting, kSingleGroup, kSingleBatchSize };

struct AblationMode {
  AblationKind kind = AblationKind::kFull;
  std::size_t index = 0;  // group or batch-size index for the single_* modes

  std::string str() const;
};

/// Parses "full", "softmax", "minmax_noreg", "naive_weighting",
/// "single_group:i" and "single_batchsize:b". Throws ValidationError.
AblationMode parse_ablation(const std::string& text);

/// Config and groups for one variant, everything else unchanged.
struct Variant {
  TrainConfig config;
  std::vector<PreparedGroup> groups;
};
Variant make_variant(const AblationMode& mode, const TrainConfig& c, const HeterogeneousGraph& g);

struct AblationReport {
  std::string mode;
  std::vector<std::uint64_t> seeds;
  std::vector<double> full;     // test accuracy of the unmodified config
  std::vector<double> variant;  // test accuracy of the variant
};

AblationReport run_ablation(const AblationMode& mode, const TrainConfig& c,
                            const HeterogeneousGraph& g, const std::vector<std::uint64_t>& seeds);

double mean(const std::vector<double>& xs);
/// Sample variance (n - 1 denominator); 0 for fewer than two values.
double variance(const std::vector<double>& xs);

}  // namespace hgens
