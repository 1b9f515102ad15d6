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

#include "hgens/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hgens/error.hpp"
#include "hgens/synth.hpp"
#include "hgens/trainer.hpp"

namespace hgens {

namespace {

double column_margin(const AttentionTensors& t) {
  double margin = std::numeric_limits<double>::infinity();
  const auto& x = t.centered;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (t.degenerate[j]) return 0.0;
    const double lo = x(t.argmin[j], j);
    const double hi = x(t.argmax[j], j);
    margin = std::min(margin, hi - lo);
    for (std::size_t v = 0; v < x.rows(); ++v) {
      if (v != t.argmin[j]) margin = std::min(margin, x(v, j) - lo);
      if (v != t.argmax[j]) margin = std::min(margin, hi - x(v, j));
    }
  }
  return margin;
}

}  // namespace

double attention_margin(const ForwardTape& tape) {
  double margin = std::numeric_limits<double>::infinity();
  auto visit = [&](const AttentionStage& s) {
    if (!s.tensors.argmin.empty()) margin = std::min(margin, column_margin(s.tensors));
  };
  for (const auto& s : tape.group_stages) visit(s);
  visit(tape.final_stage);
  return margin;
}

FiniteDiffReport finite_diff_check(const Pipeline& pipe, const ModelParams& params,
                                   std::uint64_t epoch_seed, const GradCheckOptions& opts) {
  const auto tape = forward(pipe, params, epoch_seed);
  const double margin = attention_margin(tape);
  if (margin < opts.min_margin) {
    throw StructureError("gradcheck: attention column degenerate or tied (margin " +
                         std::to_string(margin) + "); reseed");
  }
  const auto grads = backward(pipe, params, tape);

  std::vector<const DenseMatrix*> analytic;
  for_each_param(grads, [&](const std::string&, const DenseMatrix& g) { analytic.push_back(&g); });

  FiniteDiffReport rep;
  rep.eps = opts.eps;
  rep.tol = opts.tol;
  ModelParams work = params;
  std::uint64_t salt = 0;
  auto loss = [&] {
    ForwardOptions f;
    if (!opts.freeze_dropout) f.dropout_salt = ++salt;
    return loss_at(pipe, work, epoch_seed, f);
  };
  std::size_t idx = 0;
  for_each_param(work, [&](const std::string& name, DenseMatrix& w) {
    const DenseMatrix& g = *analytic[idx++];
    ParamCheck pc;
    pc.name = name;
    pc.count = w.size();
    for (std::size_t r = 0; r < w.rows(); ++r) {
      for (std::size_t c = 0; c < w.cols(); ++c) {
        const double orig = w(r, c);
        w(r, c) = orig + opts.eps;
        const double up = loss();
        w(r, c) = orig - opts.eps;
        const double down = loss();
        w(r, c) = orig;
        const double numeric = (up - down) / (2.0 * opts.eps);
        const double err = std::abs(g(r, c) - numeric) / std::max(1e-8, std::abs(numeric));
        if (err > pc.max_rel_err || (r == 0 && c == 0)) {
          pc.max_rel_err = err;
          pc.row = r;
          pc.col = c;
          pc.analytic = g(r, c);
          pc.numeric = numeric;
        }
      }
    }
    rep.num_scalars += pc.count;
    if (pc.max_rel_err > rep.max_rel_err || rep.worst_param.empty()) {
      rep.max_rel_err = pc.max_rel_err;
      rep.worst_param = name;
    }
    rep.params.push_back(std::move(pc));
  });
  rep.pass = rep.max_rel_err < opts.tol;
  return rep;
}

TinyProblem make_tiny_problem(std::uint64_t seed) {
  SynthConfig sc;
  sc.num_targets = 36;
  sc.num_classes = 3;
  sc.num_b = 12;
  sc.num_c = 12;
  sc.degree_ab = 3;
  sc.degree_ac = 3;
  sc.signal_ab = 0.6;
  sc.signal_ac = 0.6;
  sc.feature_dim = 5;
  sc.feature_noise = 1.0;
  sc.seed = seed;

  TinyProblem tp;
  tp.graph = std::make_unique<HeterogeneousGraph>(generate_synthetic(sc));
  auto& c = tp.config;
  c.hidden_dim = 8;
  c.attn_dim = 4;
  c.group_attn_dim = 4;
  c.num_layers = 2;
  c.fanout = 3;
  c.batch_sizes = {16, 36};
  c.dropout = 0.1;
  c.lambda = 0.05;
  c.seed = seed;
  c.unsafe_hparams = true;
  validate_config(c);
  tp.pipe = std::make_unique<Pipeline>(make_pipeline(c, *tp.graph));
  if (tp.pipe->groups.size() != 2) throw StructureError("gradcheck: tiny problem must have two groups");
  tp.params = init_model(c, *tp.pipe);
  return tp;
}

FiniteDiffReport run_gradcheck(std::uint64_t seed, const GradCheckOptions& opts) {
  const auto tp = make_tiny_problem(seed);
  auto rep = finite_diff_check(*tp.pipe, tp.params, epoch_seed(tp.config, 0), opts);
  rep.seed = seed;
  return rep;
}

}  // namespace hgens
