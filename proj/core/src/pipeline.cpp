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

#include "hgens/pipeline.hpp"

#include "hgens/error.hpp"
#include "hgens/parallel.hpp"
#include "hgens/rng.hpp"

namespace hgens {

PipelineOptions options_from_config(const TrainConfig& c) {
  PipelineOptions o;
  o.num_layers = c.num_layers;
  o.fanout = c.fanout;
  o.batch_sizes = c.batch_sizes;
  o.dropout = c.dropout;
  o.attention = c.attention;
  o.fusion = c.fusion;
  o.lambda = c.regularizer ? c.lambda : 0.0;
  o.exclude_diagonal = c.exclude_diagonal;
  o.threads = c.threads;
  return o;
}

Pipeline::Pipeline(const HeterogeneousGraph& g, std::vector<PreparedGroup> grps, PipelineOptions o)
    : graph(&g), groups(std::move(grps)), opts(std::move(o)) {
  if (groups.empty()) throw ValidationError("pipeline: no relation groups");
  if (opts.batch_sizes.empty()) throw ValidationError("pipeline: no batch sizes");
  targets.resize(g.num_targets());
  for (std::uint32_t i = 0; i < targets.size(); ++i) targets[i] = i;
  train_rows = g.split_ids(Split::kTrain);
}

ModelDims Pipeline::dims(std::size_t hidden, std::size_t attn_dim, std::size_t group_attn_dim) const {
  ModelDims d;
  d.hidden = hidden;
  d.num_layers = opts.num_layers;
  d.attn_dim = attn_dim;
  d.group_attn_dim = group_attn_dim;
  d.num_classes = graph->num_classes;
  d.num_batch_sizes = opts.batch_sizes.size();
  for (const auto& t : graph->node_types) d.feature_dims.push_back(t.features.cols());
  for (const auto& g : groups) d.relations_per_group.push_back(g.group.relations.size());
  return d;
}

namespace {

struct ViewTask {
  std::size_t group, bs, batch;
};

std::vector<ViewTask> view_tasks(const ForwardTape& tape) {
  std::vector<ViewTask> tasks;
  for (std::size_t i = 0; i < tape.views.size(); ++i) {
    for (std::size_t b = 0; b < tape.views[i].size(); ++b) {
      for (std::size_t k = 0; k < tape.views[i][b].size(); ++k) tasks.push_back({i, b, k});
    }
  }
  return tasks;
}

}  // namespace

ForwardTape forward(const Pipeline& pipe, const ModelParams& params, std::uint64_t epoch_seed,
                    ForwardOptions fopts) {
  const auto& g = *pipe.graph;
  const auto& o = pipe.opts;
  const std::size_t c = pipe.groups.size();
  const std::size_t m = o.batch_sizes.size();
  if (params.encoders.size() != c) throw ShapeError("forward: encoder count != group count");

  ForwardTape tape;
  tape.epoch_seed = epoch_seed;
  for (auto b : o.batch_sizes) tape.plans.push_back(plan_batches(pipe.targets, b, epoch_seed));

  tape.views.resize(c);
  tape.encoded.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    tape.views[i].resize(m);
    tape.encoded[i].resize(m);
    for (std::size_t b = 0; b < m; ++b) {
      tape.views[i][b].resize(tape.plans[b].batches.size());
      tape.encoded[i][b].resize(tape.plans[b].batches.size());
    }
  }
  const FanoutConfig fanout{o.fanout, o.num_layers};
  const double p = fopts.training ? o.dropout : 0.0;
  const auto tasks = view_tasks(tape);
  parallel_for(tasks.size(), o.threads, [&](std::size_t t) {
    const auto [i, b, k] = tasks[t];
    const ViewKey key{i, o.batch_sizes[b], k};
    const auto seed = view_seed(epoch_seed, key);
    auto& view = tape.views[i][b][k];
    view = expand_neighborhood(g, pipe.groups[i], key, tape.plans[b].batches[k], fanout, seed);
    const auto dseed = derive_seed(seed, {tag("dropout"), fopts.dropout_salt});
    tape.encoded[i][b][k] = encode_view(g, view, params.encoders[i], p, dseed, o.activation);
  });

  tape.aligned.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t b = 0; b < m; ++b) {
      tape.aligned[i].push_back(assemble_views(tape.encoded[i][b], tape.views[i][b], g.num_targets()));
    }
  }

  const auto& att = params.attention;
  std::vector<DenseMatrix> group_embeddings;
  for (std::size_t i = 0; i < c; ++i) {
    tape.group_stages.push_back(attention_forward(tape.aligned[i], att.group_projections[i],
                                                  att.group_scores[i], o.attention, o.fusion));
    group_embeddings.push_back(tape.group_stages.back().fused);
  }
  tape.final_stage = attention_forward(group_embeddings, att.final_projections, att.final_score,
                                       o.attention, o.fusion);
  tape.mlp = mlp_predict(tape.final_stage.fused, params.mlp);

  std::vector<DenseMatrix> flat_views;
  for (const auto& per_group : tape.aligned) {
    for (const auto& v : per_group) flat_views.push_back(v);
  }
  tape.diversity = diversity_matrix(flat_views);
  tape.loss = total_loss(tape.mlp.logits, g.labels, pipe.train_rows, tape.diversity, o.lambda,
                         o.exclude_diagonal);
  return tape;
}

ParamGradients backward(const Pipeline& pipe, const ModelParams& params, const ForwardTape& tape) {
  const auto& g = *pipe.graph;
  const auto& o = pipe.opts;
  const std::size_t c = pipe.groups.size();
  const std::size_t m = o.batch_sizes.size();
  if (tape.group_stages.size() != c || tape.aligned.size() != c) {
    throw ShapeError("backward: tape does not match the pipeline");
  }
  ParamGradients grads = zeros_like(params);

  const DenseMatrix g_logits = cross_entropy_backward(tape.mlp.logits, g.labels, pipe.train_rows);
  const DenseMatrix g_final = mlp_backward(tape.final_stage.fused, params.mlp, tape.mlp, g_logits, grads.mlp);

  std::vector<DenseMatrix> group_embeddings;
  for (const auto& s : tape.group_stages) group_embeddings.push_back(s.fused);
  StageGrads final_grads{grads.attention.final_projections, grads.attention.final_score};
  auto g_groups = attention_backward(tape.final_stage, group_embeddings, params.attention.final_projections,
                                     params.attention.final_score, o.attention, o.fusion, g_final,
                                     final_grads);
  grads.attention.final_projections = std::move(final_grads.projections);
  grads.attention.final_score = std::move(final_grads.score);

  std::vector<std::vector<DenseMatrix>> g_aligned(c);
  for (std::size_t i = 0; i < c; ++i) {
    StageGrads sg{grads.attention.group_projections[i], grads.attention.group_scores[i]};
    g_aligned[i] = attention_backward(tape.group_stages[i], tape.aligned[i],
                                      params.attention.group_projections[i],
                                      params.attention.group_scores[i], o.attention, o.fusion,
                                      g_groups[i], sg);
    grads.attention.group_projections[i] = std::move(sg.projections);
    grads.attention.group_scores[i] = std::move(sg.score);
  }

  if (o.lambda != 0.0) {
    std::vector<DenseMatrix> flat_views;
    for (const auto& per_group : tape.aligned) {
      for (const auto& v : per_group) flat_views.push_back(v);
    }
    auto g_div = diversity_backward(tape.diversity, flat_views, o.lambda, o.exclude_diagonal);
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t b = 0; b < m; ++b) g_aligned[i][b] += g_div[i * m + b];
    }
  }

  // Per-view encoder gradients land in private buffers, then reduce in a
  // fixed order so the result does not depend on the thread count.
  std::vector<std::vector<std::vector<DenseMatrix>>> g_views(c);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t b = 0; b < m; ++b) {
      g_views[i].push_back(split_assembled_grad(g_aligned[i][b], tape.views[i][b]));
    }
  }
  const auto tasks = view_tasks(tape);
  std::vector<EncoderParams> buffers(tasks.size());
  parallel_for(tasks.size(), o.threads, [&](std::size_t t) {
    const auto [i, b, k] = tasks[t];
    buffers[t] = zeros_like(params.encoders[i]);
    encode_view_backward(tape.views[i][b][k], params.encoders[i], tape.encoded[i][b][k].cache,
                         g_views[i][b][k], buffers[t], o.activation);
  });
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& dst = grads.encoders[tasks[t].group];
    for (std::size_t w = 0; w < dst.input_weights.size(); ++w) dst.input_weights[w] += buffers[t].input_weights[w];
    for (std::size_t j = 0; j < dst.relation_weights.size(); ++j) {
      for (std::size_t l = 0; l < dst.relation_weights[j].size(); ++l) {
        dst.relation_weights[j][l] += buffers[t].relation_weights[j][l];
      }
    }
  }
  return grads;
}

double loss_at(const Pipeline& pipe, const ModelParams& params, std::uint64_t epoch_seed,
               ForwardOptions fopts) {
  return forward(pipe, params, epoch_seed, fopts).loss.total;
}

}  // namespace hgens
