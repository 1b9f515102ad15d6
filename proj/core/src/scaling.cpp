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

#include "hgens/scaling.hpp"

#include <chrono>
#include <cmath>

#include "hgens/error.hpp"
#include "hgens/optimizer.hpp"
#include "hgens/trainer.hpp"

namespace hgens {

std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_fit: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw ValidationError("loglog_fit: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ValidationError("loglog_fit: x values must differ");
  const double slope = (n * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / n};
}

SynthConfig synth_for_edges(const SynthConfig& base, std::size_t edges) {
  SynthConfig s = base;
  const std::size_t per_target = std::max<std::size_t>(1, base.degree_ab + base.degree_ac);
  s.num_targets = std::max(base.num_classes, edges / per_target);
  const double ratio_b = static_cast<double>(base.num_b) / static_cast<double>(base.num_targets);
  const double ratio_c = static_cast<double>(base.num_c) / static_cast<double>(base.num_targets);
  s.num_b = std::max<std::size_t>(1, static_cast<std::size_t>(ratio_b * static_cast<double>(s.num_targets)));
  s.num_c = std::max<std::size_t>(1, static_cast<std::size_t>(ratio_c * static_cast<double>(s.num_targets)));
  return s;
}

ScalingReport run_scaling(const std::vector<std::size_t>& edge_sizes, const TrainConfig& config,
                          const SynthConfig& synth, std::size_t epochs) {
  if (edge_sizes.size() < 3) throw ValidationError("scaling: need at least three sizes");
  for (std::size_t i = 1; i < edge_sizes.size(); ++i) {
    if (edge_sizes[i] <= edge_sizes[i - 1]) throw ValidationError("scaling: sizes must be strictly increasing");
  }
  if (epochs == 0) throw ValidationError("scaling: epochs must be positive");
  validate_config(config);
  ScalingReport rep;
  std::vector<double> xs, ys, ws;
  for (auto edges : edge_sizes) {
    const auto g = generate_synthetic(synth_for_edges(synth, edges));
    const Pipeline pipe = make_pipeline(config, g);
    ModelParams params = init_model(config, pipe);
    AdamState adam = adam_init(params);
    const AdamConfig acfg{config.lr, config.weight_decay};
    double total = 0.0;
    double sampled = 0.0;
    for (std::size_t e = 0; e <= epochs; ++e) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto tape = forward(pipe, params, epoch_seed(config, e));
      const auto grads = backward(pipe, params, tape);
      adam_step(params, grads, adam, acfg);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (e > 0) total += dt.count();  // epoch 0 is warm-up
      if (e == 0) {
        for (const auto& per_group : tape.views) {
          for (const auto& per_size : per_group) {
            for (const auto& v : per_size) {
              for (const auto& layer : v.layer_nodes) sampled += static_cast<double>(layer.size());
            }
          }
        }
      }
    }
    ScalingPoint p;
    p.requested_edges = edges;
    p.num_nodes = g.num_nodes();
    p.num_edges = g.num_edges();
    p.size = static_cast<double>(p.num_nodes + p.num_edges);
    p.epochs = epochs;
    p.mean_epoch_seconds = total / static_cast<double>(epochs);
    p.sampled_nodes = sampled;
    xs.push_back(p.size);
    ws.push_back(sampled);
    ys.push_back(p.mean_epoch_seconds);
    rep.points.push_back(p);
  }
  std::tie(rep.slope, rep.intercept) = loglog_fit(xs, ys);
  rep.work_slope = loglog_fit(xs, ws).first;
  return rep;
}

}  // namespace hgens
