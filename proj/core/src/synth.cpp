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

#include "hgens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "hgens/error.hpp"
#include "hgens/rng.hpp"

namespace hgens {

namespace {

DenseMatrix class_centroids(std::size_t classes, std::size_t dim, Rng& rng) {
  DenseMatrix c(classes, dim);
  for (auto& v : c.data()) v = standard_normal(rng);
  return c;
}

DenseMatrix noisy_features(const std::vector<int>& cls, const DenseMatrix& centroids, double noise,
                           Rng& rng) {
  DenseMatrix x(cls.size(), centroids.cols());
  for (std::size_t i = 0; i < cls.size(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) {
      x(i, k) = centroids(static_cast<std::size_t>(cls[i]), k) + noise * standard_normal(rng);
    }
  }
  return x;
}

std::vector<int> balanced_classes(std::size_t n, std::size_t classes, Rng& rng) {
  std::vector<int> cls(n);
  for (std::size_t i = 0; i < n; ++i) cls[i] = static_cast<int>(i % classes);
  for (std::size_t i = n; i > 1; --i) std::swap(cls[i - 1], cls[uniform_below(rng, i)]);
  return cls;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> planted_edges(
    const std::vector<int>& target_cls, const std::vector<int>& aux_cls, std::size_t classes,
    std::size_t degree, const std::vector<double>& signal, Rng& rng) {
  std::vector<std::vector<std::uint32_t>> by_class(classes);
  for (std::uint32_t j = 0; j < aux_cls.size(); ++j) by_class[aux_cls[j]].push_back(j);
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t a = 0; a < target_cls.size(); ++a) {
    const auto& same = by_class[target_cls[a]];
    for (std::size_t t = 0; t < degree; ++t) {
      std::uint32_t dst;
      if (uniform01(rng) < signal[a] && !same.empty()) {
        dst = same[uniform_below(rng, same.size())];
      } else {
        dst = static_cast<std::uint32_t>(uniform_below(rng, aux_cls.size()));
      }
      edges.emplace(a, dst);
    }
  }
  return {edges.begin(), edges.end()};
}

}  // namespace

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "num_targets") c.num_targets = v.get<std::size_t>();
    else if (key == "num_classes") c.num_classes = v.get<std::size_t>();
    else if (key == "num_b") c.num_b = v.get<std::size_t>();
    else if (key == "num_c") c.num_c = v.get<std::size_t>();
    else if (key == "degree_ab") c.degree_ab = v.get<std::size_t>();
    else if (key == "degree_ac") c.degree_ac = v.get<std::size_t>();
    else if (key == "signal_ab") c.signal_ab = v.get<double>();
    else if (key == "signal_ac") c.signal_ac = v.get<double>();
    else if (key == "complementary") c.complementary = v.get<double>();
    else if (key == "feature_dim") c.feature_dim = v.get<std::size_t>();
    else if (key == "feature_noise") c.feature_noise = v.get<double>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else throw ValidationError("synth config: unknown key '" + key + "'");
  }
  return c;
}

nlohmann::json synth_config_to_json(const SynthConfig& c) {
  return {{"num_targets", c.num_targets}, {"num_classes", c.num_classes},
          {"num_b", c.num_b},             {"num_c", c.num_c},
          {"degree_ab", c.degree_ab},     {"degree_ac", c.degree_ac},
          {"signal_ab", c.signal_ab},     {"signal_ac", c.signal_ac},
          {"complementary", c.complementary},
          {"feature_dim", c.feature_dim}, {"feature_noise", c.feature_noise},
          {"seed", c.seed}};
}

void validate_synth_config(const SynthConfig& c) {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string("synth: ") + name + " must be in [0, 1]");
  };
  prob(c.signal_ab, "signal_ab");
  prob(c.signal_ac, "signal_ac");
  prob(c.complementary, "complementary");
  if (c.num_classes < 2) throw ValidationError("synth: num_classes must be >= 2");
  if (c.num_targets < c.num_classes || c.num_b == 0 || c.num_c == 0) {
    throw ValidationError("synth: node counts too small");
  }
  if (c.feature_dim == 0) throw ValidationError("synth: feature_dim must be positive");
  if (!(c.feature_noise >= 0.0) || !std::isfinite(c.feature_noise)) {
    throw ValidationError("synth: feature_noise must be finite and >= 0");
  }
}

HeterogeneousGraph generate_synthetic(const SynthConfig& c) {
  validate_synth_config(c);
  Rng rng(derive_seed(c.seed, {tag("synth")}));
  const std::size_t k = c.num_classes;

  const auto cls_a = balanced_classes(c.num_targets, k, rng);
  const auto cls_b = balanced_classes(c.num_b, k, rng);
  const auto cls_c = balanced_classes(c.num_c, k, rng);
  const auto centroids = class_centroids(k, c.feature_dim, rng);

  std::vector<double> sig_ab(c.num_targets, c.signal_ab);
  std::vector<double> sig_ac(c.num_targets, c.signal_ac);
  for (std::size_t a = 0; a < c.num_targets; ++a) {
    if (uniform01(rng) < c.complementary) (uniform01(rng) < 0.5 ? sig_ac : sig_ab)[a] = 0.0;
  }

  HeterogeneousGraph g;
  g.node_types.push_back({"A", c.num_targets, noisy_features(cls_a, centroids, c.feature_noise, rng)});
  g.node_types.push_back({"B", c.num_b, noisy_features(cls_b, centroids, c.feature_noise, rng)});
  g.node_types.push_back({"C", c.num_c, noisy_features(cls_c, centroids, c.feature_noise, rng)});
  g.edge_types.push_back({"ab", 0, 1, false, planted_edges(cls_a, cls_b, k, c.degree_ab, sig_ab, rng)});
  g.edge_types.push_back({"ac", 0, 2, false, planted_edges(cls_a, cls_c, k, c.degree_ac, sig_ac, rng)});
  g.target_type = 0;
  g.num_classes = k;
  g.labels = cls_a;

  std::vector<std::uint32_t> order(c.num_targets);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
  g.splits.assign(c.num_targets, Split::kTest);
  const std::size_t n_train = c.num_targets * 6 / 10;
  const std::size_t n_val = c.num_targets * 2 / 10;
  for (std::size_t i = 0; i < order.size(); ++i) {
    g.splits[order[i]] = i < n_train ? Split::kTrain : (i < n_train + n_val ? Split::kVal : Split::kTest);
  }
  return g;
}

}  // namespace hgens
