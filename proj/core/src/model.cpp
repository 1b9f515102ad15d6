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

#include "hgens/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "hgens/error.hpp"
#include "hgens/rng.hpp"

namespace hgens {

namespace {

DenseMatrix glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  DenseMatrix m(rows, cols);
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (auto& v : m.data()) v = (2.0 * uniform01(rng) - 1.0) * bound;
  return m;
}

template <typename Params, typename Fn>
void visit(Params& p, Fn&& fn) {
  for (std::size_t i = 0; i < p.encoders.size(); ++i) {
    auto& enc = p.encoders[i];
    const std::string base = "enc" + std::to_string(i);
    for (std::size_t t = 0; t < enc.input_weights.size(); ++t) {
      fn(base + ".in" + std::to_string(t), enc.input_weights[t]);
    }
    for (std::size_t j = 0; j < enc.relation_weights.size(); ++j) {
      for (std::size_t l = 0; l < enc.relation_weights[j].size(); ++l) {
        fn(base + ".rel" + std::to_string(j) + ".l" + std::to_string(l), enc.relation_weights[j][l]);
      }
    }
  }
  auto& att = p.attention;
  for (std::size_t i = 0; i < att.group_projections.size(); ++i) {
    for (std::size_t b = 0; b < att.group_projections[i].size(); ++b) {
      fn("att.g" + std::to_string(i) + ".proj" + std::to_string(b), att.group_projections[i][b]);
    }
    fn("att.g" + std::to_string(i) + ".score", att.group_scores[i]);
  }
  for (std::size_t i = 0; i < att.final_projections.size(); ++i) {
    fn("att.final.proj" + std::to_string(i), att.final_projections[i]);
  }
  fn(std::string("att.final.score"), att.final_score);
  fn(std::string("mlp.w1"), p.mlp.w1);
  fn(std::string("mlp.b1"), p.mlp.b1);
  fn(std::string("mlp.w2"), p.mlp.w2);
  fn(std::string("mlp.b2"), p.mlp.b2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_le(std::istream& in, int bytes) {
  unsigned char b[8] = {};
  if (!in.read(reinterpret_cast<char*>(b), bytes)) throw ValidationError("snapshot: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  if (dims.relations_per_group.empty()) throw ValidationError("init_params: no relation groups");
  Rng rng(derive_seed(seed, {tag("init")}));
  const std::size_t d = dims.hidden;
  const std::size_t m = dims.num_batch_sizes;
  const std::size_t c = dims.relations_per_group.size();
  ModelParams p;
  for (std::size_t i = 0; i < c; ++i) {
    EncoderParams enc;
    for (auto f : dims.feature_dims) enc.input_weights.push_back(glorot(f, d, rng));
    for (std::size_t j = 0; j < dims.relations_per_group[i]; ++j) {
      auto& layers = enc.relation_weights.emplace_back();
      for (std::size_t l = 0; l < dims.num_layers; ++l) layers.push_back(glorot(d, d, rng));
    }
    p.encoders.push_back(std::move(enc));
  }
  auto& att = p.attention;
  for (std::size_t i = 0; i < c; ++i) {
    auto& projs = att.group_projections.emplace_back();
    for (std::size_t b = 0; b < m; ++b) projs.push_back(glorot(d, dims.attn_dim, rng));
    att.group_scores.push_back(glorot(m * dims.attn_dim, m, rng));
  }
  for (std::size_t i = 0; i < c; ++i) att.final_projections.push_back(glorot(d, dims.group_attn_dim, rng));
  att.final_score = glorot(c * dims.group_attn_dim, c, rng);
  p.mlp.w1 = glorot(d, d, rng);
  p.mlp.b1 = DenseMatrix(1, d);
  p.mlp.w2 = glorot(d, dims.num_classes, rng);
  p.mlp.b2 = DenseMatrix(1, dims.num_classes);
  return p;
}

ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  visit(z, [](const std::string&, DenseMatrix& m) { m.fill(0.0); });
  return z;
}

void for_each_param(ModelParams& p, const std::function<void(const std::string&, DenseMatrix&)>& fn) {
  visit(p, fn);
}

void for_each_param(const ModelParams& p,
                    const std::function<void(const std::string&, const DenseMatrix&)>& fn) {
  visit(p, fn);
}

void for_each_param_pair(
    ModelParams& a, const ModelParams& b,
    const std::function<void(const std::string&, DenseMatrix&, const DenseMatrix&)>& fn) {
  std::vector<const DenseMatrix*> others;
  visit(b, [&](const std::string&, const DenseMatrix& m) { others.push_back(&m); });
  std::size_t i = 0;
  visit(a, [&](const std::string& name, DenseMatrix& m) {
    if (i >= others.size() || !m.same_shape(*others[i])) {
      throw ShapeError("parameter '" + name + "' does not match its counterpart");
    }
    fn(name, m, *others[i++]);
  });
  if (i != others.size()) throw ShapeError("parameter sets differ in size");
}

std::size_t parameter_count(const ModelParams& p) {
  std::size_t n = 0;
  visit(p, [&](const std::string&, const DenseMatrix& m) { n += m.size(); });
  return n;
}

void save_params(const std::filesystem::path& file, const ModelParams& p) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out.write("LHGE", 4);
  put_u32(out, kSnapshotVersion);
  std::uint32_t count = 0;
  visit(p, [&](const std::string&, const DenseMatrix&) { ++count; });
  put_u32(out, count);
  visit(p, [&](const std::string& name, const DenseMatrix& m) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u64(out, m.rows());
    put_u64(out, m.cols());
    for (double v : m.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  });
}

void load_params(const std::filesystem::path& file, ModelParams& p) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("snapshot: missing file " + file.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "LHGE", 4) != 0) {
    throw ValidationError("snapshot: bad magic in " + file.string());
  }
  const auto version = get_le(in, 4);
  if (version != kSnapshotVersion) {
    throw ValidationError("snapshot: unsupported version " + std::to_string(version));
  }
  const auto count = get_le(in, 4);
  std::size_t seen = 0;
  visit(p, [&](const std::string& name, DenseMatrix& m) {
    if (seen++ >= count) throw ValidationError("snapshot: too few matrices");
    const auto len = get_le(in, 4);
    std::string stored(len, '\0');
    if (!in.read(stored.data(), static_cast<std::streamsize>(len))) {
      throw ValidationError("snapshot: truncated name");
    }
    if (stored != name) throw ValidationError("snapshot: expected '" + name + "', found '" + stored + "'");
    const auto rows = get_le(in, 8);
    const auto cols = get_le(in, 8);
    if (rows != m.rows() || cols != m.cols()) {
      throw ValidationError("snapshot: shape mismatch for '" + name + "'");
    }
    for (auto& v : m.data()) v = std::bit_cast<double>(get_le(in, 8));
  });
  if (seen != count) throw ValidationError("snapshot: unexpected extra matrices");
}

}  // namespace hgens
