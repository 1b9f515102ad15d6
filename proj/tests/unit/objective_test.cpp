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

#include <cmath>

#include "hgens/error.hpp"
#include "hgens/objective.hpp"
#include "support/testing.hpp"

namespace hgens {
namespace {

using testing::Gen;

MlpParams random_mlp(Gen& gen, std::size_t d, std::size_t c) {
  return {gen.matrix(d, d), gen.matrix(1, d), gen.matrix(d, c), gen.matrix(1, c)};
}

TEST(MlpPredict, ZeroInputZeroBiasGivesZeroLogits) {
  Gen gen(100);
  auto p = random_mlp(gen, 4, 3);
  p.b1.fill(0.0);
  p.b2.fill(0.0);
  EXPECT_EQ(mlp_predict(DenseMatrix(5, 4), p).logits, DenseMatrix(5, 3));
}

TEST(MlpPredict, SingleClassIsLegal) {
  Gen gen(101);
  EXPECT_EQ(mlp_predict(gen.matrix(5, 4), random_mlp(gen, 4, 1)).logits.cols(), 1u);
}

TEST(MlpPredict, MatchesStepwiseOracle) {
  Gen gen(102);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = gen.between(1, 6), c = gen.between(1, 4), n = gen.between(1, 8);
    const auto p = random_mlp(gen, d, c);
    const auto h = gen.matrix(n, d);
    auto hid = testing::naive_matmul(testing::to_dense(h), testing::to_dense(p.w1));
    for (auto& row : hid) {
      for (std::size_t j = 0; j < d; ++j) row[j] = std::max(0.0, row[j] + p.b1(0, j));
    }
    auto logits = testing::naive_matmul(hid, testing::to_dense(p.w2));
    for (auto& row : logits) {
      for (std::size_t j = 0; j < c; ++j) row[j] += p.b2(0, j);
    }
    EXPECT_LT(testing::max_diff(testing::to_dense(mlp_predict(h, p).logits), logits), 1e-12);
  }
}

TEST(Diversity, OrthonormalViewsGiveIdentity) {
  // Each view's rows all equal one standard basis vector.
  std::vector<DenseMatrix> views;
  for (std::size_t i = 0; i < 4; ++i) {
    DenseMatrix v(3, 4);
    for (std::size_t r = 0; r < 3; ++r) v(r, i) = 1.0;
    views.push_back(v);
  }
  const auto dm = diversity_matrix(views);
  EXPECT_EQ(dm.gram, DenseMatrix::identity(4));
  EXPECT_EQ(diversity_penalty(dm, false), 4.0);
  EXPECT_EQ(diversity_penalty(dm, true), 0.0);
}

TEST(Diversity, DuplicatedViewOffDiagonalEqualsDiagonal) {
  Gen gen(103);
  const auto v = gen.matrix(5, 3);
  const std::vector<DenseMatrix> views{v, gen.matrix(4, 3), v};
  const auto dm = diversity_matrix(views);
  EXPECT_EQ(dm.gram(0, 2), dm.gram(0, 0));
  EXPECT_EQ(dm.gram(2, 0), dm.gram(2, 2));
}

TEST(Diversity, DoubleLoopOracle) {
  Gen gen(104);
  for (int t = 0; t < 20; ++t) {
    std::vector<DenseMatrix> views;
    for (int i = 0; i < 3; ++i) views.push_back(gen.matrix(gen.between(1, 6), 4));
    std::vector<std::vector<double>> pooled;
    for (const auto& v : views) {
      std::vector<double> m(4, 0.0);
      for (std::size_t r = 0; r < v.rows(); ++r) {
        for (std::size_t c = 0; c < 4; ++c) m[c] += v(r, c) / static_cast<double>(v.rows());
      }
      pooled.push_back(m);
    }
    const auto dm = diversity_matrix(views);
    double l1 = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        double s = 0.0;
        for (std::size_t c = 0; c < 4; ++c) s += pooled[a][c] * pooled[b][c];
        EXPECT_NEAR(dm.gram(a, b), s, 1e-12);
        EXPECT_EQ(dm.gram(a, b), dm.gram(b, a));
        l1 += std::abs(s);
      }
      EXPECT_GE(dm.gram(a, a), 0.0);
    }
    EXPECT_NEAR(diversity_penalty(dm, false), l1, 1e-12);
  }
}

TEST(Diversity, PenaltyInvariantToViewOrder) {
  Gen gen(105);
  std::vector<DenseMatrix> views;
  for (int i = 0; i < 4; ++i) views.push_back(gen.matrix(3, 5));
  const double base = diversity_penalty(diversity_matrix(views), false);
  std::vector<DenseMatrix> perm{views[2], views[0], views[3], views[1]};
  EXPECT_NEAR(diversity_penalty(diversity_matrix(perm), false), base, 1e-12);
}

TEST(Diversity, BackwardMatchesFiniteDifferences) {
  Gen gen(106);
  for (bool excl : {false, true}) {
    std::vector<DenseMatrix> views;
    for (int i = 0; i < 3; ++i) views.push_back(gen.matrix(gen.between(2, 5), 4));
    const auto g = diversity_backward(diversity_matrix(views), views, 0.7, excl);
    for (std::size_t v = 0; v < views.size(); ++v) {
      for (std::size_t i = 0; i < views[v].size(); ++i) {
        const double keep = views[v].data()[i];
        views[v].data()[i] = keep + 1e-6;
        const double up = 0.7 * diversity_penalty(diversity_matrix(views), excl);
        views[v].data()[i] = keep - 1e-6;
        const double dn = 0.7 * diversity_penalty(diversity_matrix(views), excl);
        views[v].data()[i] = keep;
        EXPECT_NEAR(g[v].data()[i], (up - dn) / 2e-6, 1e-7);
      }
    }
  }
}

TEST(CrossEntropy, UniformLogitsGiveLogC) {
  for (std::size_t c : {2u, 3u, 7u}) {
    const DenseMatrix logits(6, c, 0.4);
    const std::vector<int> labels{0, 1, 0, 1, 1, 0};
    const std::vector<std::uint32_t> rows{0, 2, 5};
    EXPECT_NEAR(cross_entropy(logits, labels, rows), std::log(static_cast<double>(c)), 1e-14);
  }
}

TEST(CrossEntropy, LogSumExpOracleAndNonnegativity) {
  Gen gen(107);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = gen.between(1, 10), c = gen.between(2, 5);
    const auto logits = gen.matrix(n, c, 3.0);
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<int>(gen.below(c)));
    std::vector<std::uint32_t> rows;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (gen.coin() || rows.empty()) rows.push_back(i);
    }
    double want = 0.0;
    for (auto r : rows) {
      double z = 0.0;
      for (std::size_t k = 0; k < c; ++k) z += std::exp(logits(r, k));
      want -= std::log(std::exp(logits(r, labels[r])) / z);
    }
    want /= static_cast<double>(rows.size());
    const double got = cross_entropy(logits, labels, rows);
    EXPECT_NEAR(got, want, 1e-12);
    EXPECT_GE(got, 0.0);
  }
}

TEST(CrossEntropy, BackwardMatchesFiniteDifferences) {
  Gen gen(108);
  auto logits = gen.matrix(6, 3);
  const std::vector<int> labels{0, 2, 1, 1, 0, 2};
  const std::vector<std::uint32_t> rows{1, 2, 4};
  const auto g = cross_entropy_backward(logits, labels, rows);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double keep = logits.data()[i];
    logits.data()[i] = keep + 1e-6;
    const double up = cross_entropy(logits, labels, rows);
    logits.data()[i] = keep - 1e-6;
    const double dn = cross_entropy(logits, labels, rows);
    logits.data()[i] = keep;
    EXPECT_NEAR(g.data()[i], (up - dn) / 2e-6, 1e-8);
  }
}

TEST(CrossEntropy, EmptyRowsIsValidationError) {
  const std::vector<int> labels{0};
  EXPECT_THROW(cross_entropy(DenseMatrix(1, 2), labels, {}), ValidationError);
}

TEST(TotalLoss, ComposesTerms) {
  Gen gen(109);
  const auto logits = gen.matrix(4, 3);
  const std::vector<int> labels{0, 1, 2, 0};
  const std::vector<std::uint32_t> rows{0, 1, 2, 3};
  std::vector<DenseMatrix> views{gen.matrix(4, 2), gen.matrix(4, 2)};
  const auto dm = diversity_matrix(views);
  const auto zero = total_loss(logits, labels, rows, dm, 0.0);
  EXPECT_EQ(zero.total, cross_entropy(logits, labels, rows));
  const auto l = total_loss(logits, labels, rows, dm, 0.3);
  EXPECT_EQ(l.cross_entropy, zero.cross_entropy);
  EXPECT_NEAR(l.total, l.cross_entropy + 0.3 * l.diversity, 1e-15);
  EXPECT_EQ(l.diversity, diversity_penalty(dm, false));
}

TEST(Evaluate, OneHotAndShiftedOneHot) {
  const std::size_t n = 9, c = 3;
  std::vector<int> labels;
  DenseMatrix hit(n, c), miss(n, c);
  std::vector<std::uint32_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(static_cast<int>(i % c));
    hit(i, i % c) = 1.0;
    miss(i, (i + 1) % c) = 1.0;
    rows.push_back(static_cast<std::uint32_t>(i));
  }
  EXPECT_EQ(evaluate(hit, labels, rows), 1.0);
  EXPECT_EQ(evaluate(miss, labels, rows), 0.0);
}

TEST(Evaluate, RandomLogitsNearChance) {
  Gen gen(110);
  const std::size_t n = 30000;
  const auto logits = gen.matrix(n, 3);
  std::vector<int> labels;
  std::vector<std::uint32_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(static_cast<int>(gen.below(3)));
    rows.push_back(static_cast<std::uint32_t>(i));
  }
  EXPECT_NEAR(evaluate(logits, labels, rows), 1.0 / 3.0, 0.05);
}

}  // namespace
}  // namespace hgens
