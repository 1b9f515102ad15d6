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

#include <algorithm>
#include <cmath>

#include "hgens/error.hpp"
#include "hgens/gradflow.hpp"
#include "support/testing.hpp"

namespace hgens {
namespace {

// Central differences of h_f with respect to h_i.
DenseMatrix numeric_jacobian(FlowInputs in, std::size_t i, bool residual, bool subtract_mean) {
  const std::size_t d = in.h[i].size();
  DenseMatrix j(d, d);
  const double eps = 1e-6;
  for (std::size_t b = 0; b < d; ++b) {
    const double keep = in.h[i][b];
    in.h[i][b] = keep + eps;
    const auto up = flow_forward(in, residual, subtract_mean).fused;
    in.h[i][b] = keep - eps;
    const auto dn = flow_forward(in, residual, subtract_mean).fused;
    in.h[i][b] = keep;
    for (std::size_t a = 0; a < d; ++a) j(a, b) = (up[a] - dn[a]) / (2 * eps);
  }
  return j;
}

double frob(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

TEST(GradFlow, JacobianMatchesFiniteDifferences) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t k = 2 + seed % 3;
    const auto in = random_flow_inputs(k, 3, 2, seed);
    const auto f = flow_forward(in, true);
    // Skip points within reach of a min/max swap under the probe.
    std::vector<double> sorted = f.theta;
    std::sort(sorted.begin(), sorted.end());
    double gap = 1e9;
    for (std::size_t i = 1; i < sorted.size(); ++i) gap = std::min(gap, sorted[i] - sorted[i - 1]);
    if (gap < 1e-3) continue;
    for (bool residual : {true, false}) {
      for (bool centered : {false, true}) {
        const auto j = intermediate_gradient(in, residual, centered);
        for (std::size_t i = 0; i < k; ++i) {
          const auto n = numeric_jacobian(in, i, residual, centered);
          EXPECT_LT(max_abs_diff(j[i], n), 1e-6 * std::max(1.0, frob(n))) << "seed " << seed;
        }
      }
    }
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(GradFlow, ResidualAddsExactlyOneOverKIdentity) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const std::size_t k = 2 + seed % 4, d = 2 + seed % 3;
    const auto in = random_flow_inputs(k, d, 1 + seed % 3, seed);
    const auto with = intermediate_gradient(in, true);
    const auto without = intermediate_gradient(in, false);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
          const double want = a == b ? 1.0 / static_cast<double>(k) : 0.0;
          EXPECT_NEAR(with[i](a, b) - without[i](a, b), want, 1e-12);
        }
      }
    }
  }
}

TEST(GradFlow, VanishingScenarioHeadline) {
  const auto r = vanishing_scenario(4, 1e6);
  EXPECT_EQ(r.min_source, 0u);
  EXPECT_NEAR(r.spread, 1e6, 1e-6);
  EXPECT_LT(r.norm_without[0], 1e-5);
  EXPECT_GE(r.norm_with[0], 0.25 - 1e-9);
  EXPECT_EQ(r.normalized[0], 0.0);
}

TEST(GradFlow, WithoutResidualNormDecaysLikeInverseSpread) {
  double prev = vanishing_scenario(4, 1e2).norm_without[0];
  for (double s : {1e3, 1e4, 1e5, 1e6}) {
    const auto r = vanishing_scenario(4, s);
    EXPECT_NEAR(r.norm_without[0] / prev, 0.1, 1e-3) << s;
    EXPECT_GE(r.norm_with[0], 0.25 - 1e-9);
    prev = r.norm_without[0];
  }
}

TEST(GradFlow, LowerBoundHoldsAcrossK) {
  for (std::size_t k = 2; k <= 8; ++k) {
    for (double s : {1.0, 1e3, 1e8}) {
      const auto r = vanishing_scenario(k, s, 3);
      EXPECT_GE(r.norm_with[r.min_source], 1.0 / k - 1e-9) << k << " " << s;
    }
  }
}

TEST(GradFlow, SingleSourceIsDegenerateIdentity) {
  const auto in = random_flow_inputs(1, 3, 2, 5);
  const auto f = flow_forward(in, true);
  EXPECT_TRUE(f.degenerate);
  EXPECT_EQ(f.normalized[0], 0.0);
  const auto with = intermediate_gradient(in, true);
  EXPECT_EQ(with[0], DenseMatrix::identity(3));
  EXPECT_EQ(intermediate_gradient(in, false)[0], DenseMatrix(3, 3));
}

TEST(GradFlow, TiedScoresWithSeveralSourcesAreStructureErrors) {
  auto in = random_flow_inputs(2, 2, 1, 6);
  in.score.fill(0.0);
  EXPECT_THROW(intermediate_gradient(in, true), StructureError);
}

TEST(GradFlow, InputValidation) {
  EXPECT_THROW(vanishing_inputs(1, 10.0), ValidationError);
  EXPECT_THROW(vanishing_inputs(3, 0.0), ValidationError);
  EXPECT_THROW(vanishing_inputs(3, 10.0, 1), ValidationError);
  auto in = random_flow_inputs(3, 2, 2, 1);
  in.h[1].push_back(0.0);
  EXPECT_THROW(check_flow_inputs(in), ShapeError);
}

TEST(GradFlow, SpectralNormOracles) {
  EXPECT_NEAR(spectral_norm(DenseMatrix::from_rows({{3, 0}, {0, -5}})), 5.0, 1e-12);
  // Rank one: ||u v^T|| = ||u|| ||v||.
  EXPECT_NEAR(spectral_norm(DenseMatrix::from_rows({{1 * 2, 1 * -1}, {3 * 2, 3 * -1}})),
              std::sqrt(10.0) * std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(spectral_norm(DenseMatrix::identity(4)), 1.0, 1e-15);
}

}  // namespace
}  // namespace hgens
