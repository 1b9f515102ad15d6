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

#include <gtest/gtest.h>

#include <numeric>

#include "hgens/encoder.hpp"
#include "hgens/error.hpp"
#include "support/dense_oracle.hpp"
#include "support/testing.hpp"

namespace hgens {
namespace {

using testing::Dense;
using testing::Gen;

EncoderParams random_params(Gen& gen, const HeterogeneousGraph& g, std::size_t relations,
                            std::size_t d, std::size_t layers) {
  EncoderParams p;
  for (const auto& t : g.node_types) p.input_weights.push_back(gen.matrix(t.features.cols(), d, 0.5));
  p.relation_weights.resize(relations);
  for (auto& per : p.relation_weights) {
    for (std::size_t l = 0; l < layers; ++l) per.push_back(gen.matrix(d, d, 0.5));
  }
  return p;
}

std::vector<std::uint32_t> all_targets(const HeterogeneousGraph& g) {
  std::vector<std::uint32_t> v(g.num_targets());
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

TEST(InputTransform, IdentityOnNonnegativeInput) {
  Gen gen(30);
  DenseMatrix x(5, 4);
  for (auto& v : x.data()) v = gen.uniform(0, 3);
  const auto out = input_transform(x, DenseMatrix::identity(4), 0.0, 1);
  EXPECT_EQ(out.activations, x);
}

TEST(InputTransform, ZeroInputGivesZero) {
  Gen gen(31);
  const auto out = input_transform(DenseMatrix(3, 4), gen.matrix(4, 6), 0.3, 2);
  EXPECT_EQ(out.activations, DenseMatrix(3, 6));
}

TEST(InputTransform, MatchesStepwiseOracle) {
  Gen gen(32);
  for (int t = 0; t < 20; ++t) {
    const auto x = gen.matrix(gen.between(1, 8), gen.between(1, 6));
    const auto w = gen.matrix(x.cols(), gen.between(1, 6));
    const auto out = input_transform(x, w, 0.4, t);
    // Oracle: apply the recorded mask by hand, multiply, clamp.
    Dense xd = testing::to_dense(x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < x.cols(); ++j) xd[i][j] *= out.mask.mask(i, j) / 0.6;
    }
    const Dense want = testing::relu_dense(testing::naive_matmul(xd, testing::to_dense(w)));
    EXPECT_LT(testing::max_diff(testing::to_dense(out.activations), want), 1e-12);
  }
}

ViewHop identity_hop(std::size_t n, std::size_t relations) {
  ViewHop hop;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < n; ++i) pairs.emplace_back(i, i);
  for (std::size_t j = 0; j < relations; ++j) {
    hop.sampled.push_back(RelationAdjacency::from_pairs(n, n, pairs));
    hop.normalized.push_back(normalize_adjacency(hop.sampled.back()));
  }
  return hop;
}

TEST(RelationalLayer, IdentityAdjacencyAndWeightIsRelu) {
  Gen gen(33);
  const auto h = gen.matrix(6, 3);
  const std::vector<DenseMatrix> w{DenseMatrix::identity(3)};
  EXPECT_EQ(relational_layer(identity_hop(6, 1), h, w, Activation::kRelu), relu(h));
}

TEST(RelationalLayer, DuplicatedRelationDoublesPreactivation) {
  Gen gen(34);
  const auto h = gen.matrix(6, 3);
  const auto w = gen.matrix(3, 3);
  const std::vector<DenseMatrix> one{w}, two{w, w};
  auto single = relational_layer(identity_hop(6, 1), h, one, Activation::kIdentity);
  single *= 2.0;
  EXPECT_EQ(relational_layer(identity_hop(6, 2), h, two, Activation::kRelu), relu(single));
}

TEST(RelationalLayer, MatchesDensifiedOracle) {
  Gen gen(35);
  for (int t = 0; t < 30; ++t) {
    const std::size_t rows = gen.between(1, 7), cols = gen.between(1, 7), d = gen.between(1, 4);
    const std::size_t rels = gen.between(1, 3);
    ViewHop hop;
    for (std::size_t j = 0; j < rels; ++j) {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
      for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
          if (gen.coin(0.4)) pairs.emplace_back(r, c);
        }
      }
      hop.sampled.push_back(RelationAdjacency::from_pairs(rows, cols, pairs));
      hop.normalized.push_back(normalize_adjacency(hop.sampled.back()));
    }
    const auto h = gen.matrix(cols, d);
    std::vector<DenseMatrix> ws;
    for (std::size_t j = 0; j < rels; ++j) ws.push_back(gen.matrix(d, d));
    Dense pre(rows, std::vector<double>(d, 0.0));
    for (std::size_t j = 0; j < rels; ++j) {
      const auto a = testing::naive_row_normalize(testing::to_dense(hop.sampled[j]));
      const auto term = testing::naive_matmul(testing::naive_matmul(a, testing::to_dense(h)),
                                              testing::to_dense(ws[j]));
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < d; ++c) pre[r][c] += term[r][c];
      }
    }
    EXPECT_LT(testing::max_diff(testing::to_dense(relational_layer(hop, h, ws, Activation::kRelu)),
                                testing::relu_dense(pre)),
              1e-12);
  }
}

TEST(RelationalLayer, WeightCountMismatchIsStructureError) {
  Gen gen(36);
  const std::vector<DenseMatrix> w{DenseMatrix::identity(2)};
  EXPECT_THROW(relational_layer(identity_hop(3, 2), gen.matrix(3, 2), w, Activation::kRelu),
               StructureError);
}

struct EncodeCase {
  HeterogeneousGraph g;
  std::vector<Relation> relations;
  PreparedGroup group;
};

EncodeCase random_case(Gen& gen, std::size_t max_nodes) {
  for (;;) {
    EncodeCase c{testing::random_graph(gen, gen.between(1, 3), max_nodes), {}, {}};
    c.relations = default_metapath_relations(c.g);
    // Mix in single-step relations from other types so carry paths appear.
    for (const auto& et : c.g.edge_types) {
      if (et.src_type == c.g.target_type && et.dst_type != c.g.target_type && gen.coin()) {
        c.relations.push_back(make_relation(c.g, "rev-" + et.name, {"~" + et.name}));
      }
    }
    if (c.relations.empty()) continue;
    c.group = prepare_group(c.g, {"g", c.relations});
    return c;
  }
}

TEST(EncodeView, CapInactiveMatchesFullGraphOracle) {
  Gen gen(37);
  for (int t = 0; t < 40; ++t) {
    auto c = random_case(gen, 10);
    const std::size_t L = gen.between(1, 3), d = gen.between(1, 5);
    const auto params = random_params(gen, c.g, c.relations.size(), d, L);
    const auto ids = all_targets(c.g);
    const auto view = expand_neighborhood(c.g, c.group, {0, ids.size(), 0}, ids, {1000, L}, t);
    const auto emb = encode_view(c.g, view, params, 0.0, 0);
    const auto want = testing::dense_encode(c.g, c.relations, params.input_weights,
                                            params.relation_weights, L);
    EXPECT_LT(testing::max_diff(testing::to_dense(emb.embedding), want), 1e-12);
  }
}

TEST(EncodeView, OneLayerSubsetMatchesFullGraphRows) {
  Gen gen(38);
  auto c = random_case(gen, 12);
  const auto params = random_params(gen, c.g, c.relations.size(), 4, 1);
  const auto want = testing::dense_encode(c.g, c.relations, params.input_weights,
                                          params.relation_weights, 1);
  std::vector<std::uint32_t> batch;
  for (std::uint32_t i = 0; i < c.g.num_targets(); i += 2) batch.push_back(i);
  const auto view = expand_neighborhood(c.g, c.group, {0, 2, 0}, batch, {1000, 1}, 3);
  const auto emb = encode_view(c.g, view, params, 0.0, 0);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(emb.embedding(r, k), want[batch[r]][k], 1e-12);
  }
}

TEST(EncodeView, ZeroFeaturesGiveZeroEmbedding) {
  Gen gen(39);
  auto c = random_case(gen, 10);
  for (auto& t : c.g.node_types) t.features.fill(0.0);
  const auto params = random_params(gen, c.g, c.relations.size(), 3, 2);
  const auto ids = all_targets(c.g);
  const auto view = expand_neighborhood(c.g, c.group, {0, ids.size(), 0}, ids, {3, 2}, 1);
  const auto emb = encode_view(c.g, view, params, 0.2, 5);
  EXPECT_EQ(emb.embedding, DenseMatrix(ids.size(), 3));
}

TEST(EncodeView, LinearPathIsHomogeneousInInputWeights) {
  Gen gen(40);
  auto c = random_case(gen, 10);
  auto params = random_params(gen, c.g, c.relations.size(), 3, 2);
  const auto ids = all_targets(c.g);
  const auto view = expand_neighborhood(c.g, c.group, {0, ids.size(), 0}, ids, {2, 2}, 1);
  auto base = encode_view(c.g, view, params, 0.0, 0, Activation::kIdentity).embedding;
  for (auto& w : params.input_weights) w *= 2.0;
  const auto doubled = encode_view(c.g, view, params, 0.0, 0, Activation::kIdentity).embedding;
  base *= 2.0;
  EXPECT_LT(max_abs_diff(base, doubled), 1e-12);
}

TEST(AssembleViews, SingleBatchIsIdentityPlacement) {
  Gen gen(41);
  auto c = random_case(gen, 10);
  const auto params = random_params(gen, c.g, c.relations.size(), 3, 1);
  const auto ids = all_targets(c.g);
  std::vector<BatchView> views{expand_neighborhood(c.g, c.group, {0, ids.size(), 0}, ids, {1000, 1}, 1)};
  std::vector<ViewEmbedding> embs{encode_view(c.g, views[0], params, 0.0, 0)};
  EXPECT_EQ(assemble_views(embs, views, ids.size()), embs[0].embedding);
}

TEST(AssembleViews, ShuffledBatchesMatchSingleBatch) {
  Gen gen(42);
  for (int t = 0; t < 20; ++t) {
    auto c = random_case(gen, 12);
    const auto params = random_params(gen, c.g, c.relations.size(), 3, 2);
    const auto ids = all_targets(c.g);
    std::vector<BatchView> one{expand_neighborhood(c.g, c.group, {0, ids.size(), 0}, ids, {1000, 2}, 1)};
    std::vector<ViewEmbedding> one_emb{encode_view(c.g, one[0], params, 0.0, 0)};
    const auto whole = assemble_views(one_emb, one, ids.size());

    const auto plan = plan_batches(ids, std::max<std::size_t>(1, ids.size() / 2), t);
    std::vector<BatchView> views;
    std::vector<ViewEmbedding> embs;
    for (std::size_t b = 0; b < plan.batches.size(); ++b) {
      views.push_back(expand_neighborhood(c.g, c.group, {0, plan.batch_size, b}, plan.batches[b], {1000, 2}, 9));
      embs.push_back(encode_view(c.g, views.back(), params, 0.0, 0));
    }
    EXPECT_LT(max_abs_diff(assemble_views(embs, views, ids.size()), whole), 1e-12);
    // Split is the exact inverse of assembly.
    const auto parts = split_assembled_grad(whole, views);
    for (std::size_t b = 0; b < views.size(); ++b) EXPECT_LT(max_abs_diff(parts[b], embs[b].embedding), 1e-12);
  }
}

TEST(AssembleViews, MissingBatchIsCoverageGap) {
  const auto g = testing::toy_graph();
  const auto group = prepare_group(g, {"g", default_metapath_relations(g)});
  Gen gen(43);
  const auto params = random_params(gen, g, 1, 2, 1);
  const std::vector<std::uint32_t> first{0, 1}, second{2, 3};
  std::vector<BatchView> views{expand_neighborhood(g, group, {0, 2, 0}, first, {5, 1}, 1)};
  std::vector<ViewEmbedding> embs{encode_view(g, views[0], params, 0.0, 0)};
  EXPECT_THROW(assemble_views(embs, views, 4), ValidationError);
  views.push_back(expand_neighborhood(g, group, {0, 2, 1}, first, {5, 1}, 1));
  embs.push_back(encode_view(g, views[1], params, 0.0, 0));
  EXPECT_THROW(assemble_views(embs, views, 4), ValidationError);
  views[1] = expand_neighborhood(g, group, {0, 2, 1}, second, {5, 1}, 1);
  embs[1] = encode_view(g, views[1], params, 0.0, 0);
  EXPECT_NO_THROW(assemble_views(embs, views, 4));
}

// Finite differences of <R, encode(params)> against the reverse pass.
TEST(EncodeViewBackward, MatchesFiniteDifferences) {
  Gen gen(44);
  for (int t = 0; t < 10; ++t) {
    auto c = random_case(gen, 8);
    const std::size_t L = gen.between(1, 2);
    auto params = random_params(gen, c.g, c.relations.size(), 3, L);
    const auto ids = all_targets(c.g);
    const auto view = expand_neighborhood(c.g, c.group, {0, ids.size(), 0}, ids, {2, L}, t);
    const auto r = gen.matrix(ids.size(), 3);
    auto loss = [&](const EncoderParams& p) {
      const auto e = encode_view(c.g, view, p, 0.25, 17).embedding;
      double s = 0.0;
      for (std::size_t i = 0; i < e.size(); ++i) s += e.data()[i] * r.data()[i];
      return s;
    };
    const auto fwd = encode_view(c.g, view, params, 0.25, 17);
    auto grads = zeros_like(params);
    encode_view_backward(view, params, fwd.cache, r, grads);
    auto check = [&](DenseMatrix& w, const DenseMatrix& gw) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double keep = w.data()[i];
        w.data()[i] = keep + 1e-6;
        const double up = loss(params);
        w.data()[i] = keep - 1e-6;
        const double dn = loss(params);
        w.data()[i] = keep;
        const double num = (up - dn) / 2e-6;
        EXPECT_NEAR(gw.data()[i], num, 1e-6 * std::max(1.0, std::abs(num)));
      }
    };
    for (std::size_t k = 0; k < params.input_weights.size(); ++k) check(params.input_weights[k], grads.input_weights[k]);
    for (std::size_t j = 0; j < params.relation_weights.size(); ++j) {
      for (std::size_t l = 0; l < L; ++l) check(params.relation_weights[j][l], grads.relation_weights[j][l]);
    }
  }
}

}  // namespace
}  // namespace hgens
