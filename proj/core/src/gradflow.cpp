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

#include "hgens/gradflow.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "hgens/error.hpp"
#include "hgens/fusion.hpp"
#include "hgens/rng.hpp"

namespace hgens {

std::size_t flow_sources(const FlowInputs& in) { return in.h.size(); }

void check_flow_inputs(const FlowInputs& in) {
  const std::size_t k = in.h.size();
  if (k == 0) throw ShapeError("gradflow: no sources");
  const std::size_t d = in.h[0].size();
  if (in.w.size() != k) throw ShapeError("gradflow: need one W per source");
  const std::size_t dp = in.w[0].cols();
  for (std::size_t i = 0; i < k; ++i) {
    if (in.h[i].size() != d) throw ShapeError("gradflow: h vectors differ in length");
    if (in.w[i].rows() != d || in.w[i].cols() != dp) throw ShapeError("gradflow: W shape mismatch");
  }
  if (in.score.rows() != k * dp || in.score.cols() != k) {
    throw ShapeError("gradflow: W' must be " + std::to_string(k * dp) + "x" + std::to_string(k));
  }
}

namespace {

// u(i, j) = W_i W'_ij, the gradient of theta_j w.r.t. h_i.
std::vector<double> theta_gradient(const FlowInputs& in, std::size_t i, std::size_t j) {
  const auto& w = in.w[i];
  const std::size_t dp = w.cols();
  std::vector<double> u(w.rows(), 0.0);
  for (std::size_t a = 0; a < w.rows(); ++a) {
    for (std::size_t q = 0; q < dp; ++q) u[a] += w(a, q) * in.score(i * dp + q, j);
  }
  return u;
}

}  // namespace

FlowForward flow_forward(const FlowInputs& in, bool with_residual, bool subtract_mean) {
  check_flow_inputs(in);
  const std::size_t k = in.h.size();
  const std::size_t d = in.h[0].size();
  const std::size_t dp = in.w[0].cols();
  FlowForward f;
  f.theta.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> proj(dp, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t q = 0; q < dp; ++q) proj[q] += in.h[i][a] * in.w[i](a, q);
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t q = 0; q < dp; ++q) f.theta[j] += proj[q] * in.score(i * dp + q, j);
    }
  }
  if (subtract_mean) {
    double m = 0.0;
    for (double t : f.theta) m += t;
    m /= static_cast<double>(k);
    for (double& t : f.theta) t -= m;
  }
  for (std::size_t j = 1; j < k; ++j) {
    if (f.theta[j] < f.theta[f.lo]) f.lo = j;
    if (f.theta[j] > f.theta[f.hi]) f.hi = j;
  }
  f.spread = f.theta[f.hi] - f.theta[f.lo];
  f.degenerate = f.spread < kDegenerateSpread;
  f.normalized.assign(k, 0.0);
  if (!f.degenerate) {
    for (std::size_t j = 0; j < k; ++j) f.normalized[j] = (f.theta[j] - f.theta[f.lo]) / f.spread;
  }
  const double r = with_residual ? 1.0 / static_cast<double>(k) : 0.0;
  f.fused.assign(d, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t a = 0; a < d; ++a) f.fused[a] += (f.normalized[i] + r) * in.h[i][a];
  }
  return f;
}

std::vector<DenseMatrix> intermediate_gradient(const FlowInputs& in, bool with_residual,
                                               bool subtract_mean) {
  const auto f = flow_forward(in, with_residual, subtract_mean);
  const std::size_t k = in.h.size();
  const std::size_t d = in.h[0].size();
  if (k >= 2 && f.degenerate) {
    throw StructureError("gradflow: degenerate raw attention spread " + std::to_string(f.spread));
  }
  const double r = with_residual ? 1.0 / static_cast<double>(k) : 0.0;
  std::vector<DenseMatrix> out;
  for (std::size_t i = 0; i < k; ++i) {
    DenseMatrix jac(d, d);
    if (!f.degenerate) {
      std::vector<std::vector<double>> u(k);
      for (std::size_t j = 0; j < k; ++j) u[j] = theta_gradient(in, i, j);
      if (subtract_mean) {
        std::vector<double> mu(d, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
          for (std::size_t a = 0; a < d; ++a) mu[a] += u[j][a] / static_cast<double>(k);
        }
        for (auto& uj : u) {
          for (std::size_t a = 0; a < d; ++a) uj[a] -= mu[a];
        }
      }
      // d theta~_j / d h_i = (u_j - u_lo) / s - (theta_j - theta_lo) (u_hi - u_lo) / s^2
      const double s = f.spread;
      for (std::size_t j = 0; j < k; ++j) {
        const double c = (f.theta[j] - f.theta[f.lo]) / (s * s);
        for (std::size_t b = 0; b < d; ++b) {
          const double g = (u[j][b] - u[f.lo][b]) / s - c * (u[f.hi][b] - u[f.lo][b]);
          for (std::size_t a = 0; a < d; ++a) jac(a, b) += in.h[j][a] * g;
        }
      }
    }
    for (std::size_t a = 0; a < d; ++a) jac(a, a) += f.normalized[i] + r;
    out.push_back(std::move(jac));
  }
  return out;
}

double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  return svd.singularValues()(0);
}

GradFlowReport analyze_flow(const FlowInputs& in, bool subtract_mean) {
  const auto f = flow_forward(in, true, subtract_mean);
  const auto with = intermediate_gradient(in, true, subtract_mean);
  const auto without = intermediate_gradient(in, false, subtract_mean);
  GradFlowReport r;
  r.k = in.h.size();
  r.spread = f.spread;
  r.theta = f.theta;
  r.normalized = f.normalized;
  r.min_source = f.lo;
  for (std::size_t i = 0; i < r.k; ++i) {
    r.norm_with.push_back(spectral_norm(with[i]));
    r.norm_without.push_back(spectral_norm(without[i]));
    DenseMatrix second = without[i];
    for (std::size_t a = 0; a < second.rows(); ++a) second(a, a) -= f.normalized[i];
    r.second_term.push_back(spectral_norm(second));
  }
  return r;
}

FlowInputs vanishing_inputs(std::size_t k, double spread, std::size_t d) {
  if (k < 2) throw ValidationError("gradflow: vanishing scenario needs k >= 2");
  if (!(spread > 0.0) || !std::isfinite(spread)) throw ValidationError("gradflow: spread must be positive");
  if (d < 2) throw ValidationError("gradflow: vanishing scenario needs d >= 2");
  FlowInputs in;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> h(d, 0.0);
    h[0] = 1.0;
    in.h.push_back(std::move(h));
    in.w.push_back(DenseMatrix::identity(d));
  }
  in.score = DenseMatrix(k * d, k);
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t q = 0; q < d; ++q) {
      in.score(q, l) = 0.5 * std::cos(1.3 * static_cast<double>(l) + 0.7 * static_cast<double>(q));
    }
    // Source 1 shifts theta_l to l * spread / (k - 1); only h[0] is non-zero.
    const double target = static_cast<double>(l) * spread / static_cast<double>(k - 1);
    in.score(d, l) = target - in.score(0, l);
  }
  return in;
}

GradFlowReport vanishing_scenario(std::size_t k, double spread, std::size_t d) {
  return analyze_flow(vanishing_inputs(k, spread, d));
}

FlowInputs random_flow_inputs(std::size_t k, std::size_t d, std::size_t dp, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {tag("gradflow")}));
  auto normal = [&] { return standard_normal(rng); };
  FlowInputs in;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> h(d);
    for (auto& v : h) v = normal();
    in.h.push_back(std::move(h));
    DenseMatrix w(d, dp);
    for (auto& v : w.data()) v = normal();
    in.w.push_back(std::move(w));
  }
  in.score = DenseMatrix(k * dp, k);
  for (auto& v : in.score.data()) v = normal();
  return in;
}

}  // namespace hgens
