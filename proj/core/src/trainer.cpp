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

#include "hgens/trainer.hpp"

#include <cmath>
#include <sstream>

#include "hgens/error.hpp"
#include "hgens/optimizer.hpp"
#include "hgens/rng.hpp"

namespace hgens {

Pipeline make_pipeline(const TrainConfig& c, const HeterogeneousGraph& g,
                       std::vector<PreparedGroup> groups) {
  return Pipeline(g, std::move(groups), options_from_config(c));
}

Pipeline make_pipeline(const TrainConfig& c, const HeterogeneousGraph& g) {
  return make_pipeline(c, g, resolve_groups(c, g));
}

ModelParams init_model(const TrainConfig& c, const Pipeline& pipe) {
  return init_params(pipe.dims(c.hidden_dim, c.attn_dim, c.group_attn_dim), c.seed);
}

std::uint64_t epoch_seed(const TrainConfig& c, std::size_t epoch) {
  return derive_seed(c.seed, {tag("epoch"), epoch});
}

DenseMatrix predict(const Pipeline& pipe, const ModelParams& params, std::uint64_t eval_seed) {
  ForwardOptions f;
  f.training = false;
  return forward(pipe, params, eval_seed, f).mlp.logits;
}

double evaluate_run(const ModelParams& params, const TrainConfig& c, const Pipeline& pipe,
                    Split split) {
  const auto rows = pipe.graph->split_ids(split);
  if (rows.empty()) throw ValidationError("evaluate: split '" + std::string(split_name(split)) + "' is empty");
  return evaluate(predict(pipe, params, c.eval_seed), pipe.graph->labels, rows);
}

double evaluate_run(const ModelParams& params, const TrainConfig& c, const HeterogeneousGraph& g,
                    Split split) {
  return evaluate_run(params, c, make_pipeline(c, g), split);
}

RunArtifacts train(const TrainConfig& c, const HeterogeneousGraph& g, const TrainHooks& hooks) {
  return train(c, g, resolve_groups(c, g), hooks);
}

RunArtifacts train(const TrainConfig& c, const HeterogeneousGraph& g,
                   std::vector<PreparedGroup> groups, const TrainHooks& hooks) {
  validate_config(c);
  const Pipeline pipe = make_pipeline(c, g, std::move(groups));
  const auto val_rows = g.split_ids(Split::kVal);
  const auto test_rows = g.split_ids(Split::kTest);
  if (pipe.train_rows.empty()) throw ValidationError("train: no training rows");
  if (val_rows.empty()) throw ValidationError("train: no validation rows");

  RunArtifacts run;
  run.config = c;
  ModelParams params = init_model(c, pipe);
  AdamState adam = adam_init(params);
  const AdamConfig acfg{c.lr, c.weight_decay};
  run.best = params;

  for (std::size_t epoch = 0; epoch < c.max_epochs; ++epoch) {
    const auto tape = forward(pipe, params, epoch_seed(c, epoch));
    const auto& loss = tape.loss;
    if (!std::isfinite(loss.total)) {
      std::ostringstream os;
      os << "non-finite loss at epoch " << epoch << ": ce=" << loss.cross_entropy
         << " diversity=" << loss.diversity << " lambda=" << loss.lambda;
      throw DivergenceError(os.str());
    }
    const auto grads = backward(pipe, params, tape);
    adam_step(params, grads, adam, acfg);

    const DenseMatrix logits = predict(pipe, params, c.eval_seed);
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss.total;
    m.ce = loss.cross_entropy;
    m.diversity = loss.diversity;
    m.val_acc = evaluate(logits, g.labels, val_rows);
    m.test_acc = test_rows.empty() ? 0.0 : evaluate(logits, g.labels, test_rows);
    run.metrics.push_back(m);
    if (hooks.on_epoch) hooks.on_epoch(m);

    if (m.val_acc > run.best_val_acc) {
      run.best_val_acc = m.val_acc;
      run.best_epoch = epoch;
      run.best = params;
      run.test_acc = m.test_acc;
    } else if (epoch - run.best_epoch >= c.patience) {
      break;
    }
  }
  return run;
}

// ---------------------------------------------------------------------------

std::string AblationMode::str() const {
  switch (kind) {
    case AblationKind::kFull: return "full";
    case AblationKind::kSoftmax: return "softmax";
    case AblationKind::kMinMaxNoReg: return "minmax_noreg";
    case AblationKind::kNaiveWeighting: return "naive_weighting";
    case AblationKind::kSingleGroup: return "single_group:" + std::to_string(index);
    case AblationKind::kSingleBatchSize: return "single_batchsize:" + std::to_string(index);
  }
  return "?";
}

AblationMode parse_ablation(const std::string& text) {
  if (text == "full") return {AblationKind::kFull, 0};
  if (text == "softmax") return {AblationKind::kSoftmax, 0};
  if (text == "minmax_noreg") return {AblationKind::kMinMaxNoReg, 0};
  if (text == "naive_weighting") return {AblationKind::kNaiveWeighting, 0};
  for (auto [prefix, kind] : {std::pair{std::string("single_group"), AblationKind::kSingleGroup},
                              std::pair{std::string("single_batchsize"), AblationKind::kSingleBatchSize}}) {
    if (text.rfind(prefix, 0) != 0) continue;
    std::string rest = text.substr(prefix.size());
    if (rest.size() >= 2 && (rest.front() == ':' || rest.front() == '(')) {
      rest = rest.substr(1);
      if (!rest.empty() && rest.back() == ')') rest.pop_back();
      if (!rest.empty() && rest.find_first_not_of("0123456789") == std::string::npos) {
        return {kind, static_cast<std::size_t>(std::stoul(rest))};
      }
    }
    throw ValidationError("ablation mode '" + text + "': expected " + prefix + ":<index>");
  }
  throw ValidationError("unknown ablation mode '" + text + "'");
}

Variant make_variant(const AblationMode& mode, const TrainConfig& c, const HeterogeneousGraph& g) {
  Variant v{c, resolve_groups(c, g)};
  switch (mode.kind) {
    case AblationKind::kFull: break;
    case AblationKind::kSoftmax: v.config.attention = AttentionMode::kSoftmax; break;
    case AblationKind::kMinMaxNoReg: v.config.regularizer = false; break;
    case AblationKind::kNaiveWeighting: v.config.fusion = FusionMode::kNaive; break;
    case AblationKind::kSingleGroup: {
      if (mode.index >= v.groups.size()) {
        throw ValidationError("single_group index " + std::to_string(mode.index) + " out of range (" +
                              std::to_string(v.groups.size()) + " groups)");
      }
      auto keep = std::move(v.groups[mode.index]);
      v.groups.clear();
      v.groups.push_back(std::move(keep));
      break;
    }
    case AblationKind::kSingleBatchSize: {
      if (mode.index >= c.batch_sizes.size()) {
        throw ValidationError("single_batchsize index " + std::to_string(mode.index) + " out of range");
      }
      v.config.batch_sizes = {c.batch_sizes[mode.index]};
      break;
    }
  }
  return v;
}

AblationReport run_ablation(const AblationMode& mode, const TrainConfig& c,
                            const HeterogeneousGraph& g, const std::vector<std::uint64_t>& seeds) {
  AblationReport r;
  r.mode = mode.str();
  r.seeds = seeds;
  for (auto seed : seeds) {
    TrainConfig base = c;
    base.seed = seed;
    r.full.push_back(train(base, g).test_acc);
    auto v = make_variant(mode, base, g);
    r.variant.push_back(train(v.config, g, std::move(v.groups)).test_acc);
  }
  return r;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return s / static_cast<double>(xs.size() - 1);
}

}  // namespace hgens
