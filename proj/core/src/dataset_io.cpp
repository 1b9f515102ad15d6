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

#include "hgens/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "hgens/error.hpp"

namespace hgens {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const fs::path& file, std::size_t line, const std::string& msg) {
  std::string where = file.filename().string();
  if (line > 0) where += ":" + std::to_string(line);
  throw ValidationError(where + ": " + msg);
}

std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p);
  if (!in) fail(p, 0, "missing file " + p.string());
  return in;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename T>
T manifest_get(const json& j, const char* key, const fs::path& manifest) {
  if (!j.contains(key)) fail(manifest, 0, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(manifest, 0, std::string("bad value for '") + key + "': " + e.what());
  }
}

DenseMatrix read_features(const fs::path& file, std::size_t count, std::size_t dim) {
  auto in = open_input(file);
  DenseMatrix m(count, dim);
  std::string line;
  std::size_t row = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (row >= count) fail(file, lineno, "more feature rows than the declared count " +
                                             std::to_string(count));
    auto fields = split_fields(line, ',');
    if (fields.size() != dim) {
      fail(file, lineno, "feature-dim mismatch: " + std::to_string(fields.size()) +
                             " values, expected " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      double v;
      if (!parse_number(fields[c], v)) {
        fail(file, lineno, "cannot parse feature value '" + std::string(fields[c]) + "'");
      }
      m(row, c) = v;
    }
    ++row;
  }
  if (row != count) {
    fail(file, lineno, "expected " + std::to_string(count) + " feature rows, found " +
                           std::to_string(row));
  }
  return m;
}

template <typename F>
void read_tsv(const fs::path& file, F&& on_row) {
  auto in = open_input(file);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line, '\t');
    if (fields.size() != 2) fail(file, lineno, "expected 2 tab-separated fields");
    on_row(lineno, fields[0], fields[1]);
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

HeterogeneousGraph load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  auto in = open_input(manifest_path);
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    fail(manifest_path, 0, std::string("malformed JSON: ") + e.what());
  }

  HeterogeneousGraph g;
  const auto node_specs = manifest_get<json>(manifest, "node_types", manifest_path);
  if (!node_specs.is_array() || node_specs.empty()) {
    fail(manifest_path, 0, "node_types must be a non-empty list");
  }
  for (const auto& spec : node_specs) {
    NodeType t;
    t.name = manifest_get<std::string>(spec, "name", manifest_path);
    t.count = manifest_get<std::size_t>(spec, "count", manifest_path);
    const auto dim = manifest_get<std::size_t>(spec, "feature_dim", manifest_path);
    const auto file = manifest_get<std::string>(spec, "feature_file", manifest_path);
    t.features = read_features(dir / file, t.count, dim);
    for (const auto& other : g.node_types) {
      if (other.name == t.name) fail(manifest_path, 0, "duplicate node type '" + t.name + "'");
    }
    g.node_types.push_back(std::move(t));
  }

  auto type_of = [&](const std::string& name) -> NodeTypeId {
    try {
      return g.node_type_id(name);
    } catch (const ValidationError& e) {
      fail(manifest_path, 0, e.what());
    }
  };

  const auto edge_specs = manifest.value("edge_types", json::array());
  for (const auto& spec : edge_specs) {
    EdgeType e;
    e.name = manifest_get<std::string>(spec, "name", manifest_path);
    e.src_type = type_of(manifest_get<std::string>(spec, "src_type", manifest_path));
    e.dst_type = type_of(manifest_get<std::string>(spec, "dst_type", manifest_path));
    e.undirected = spec.value("undirected", false);
    const fs::path file = dir / manifest_get<std::string>(spec, "edge_file", manifest_path);
    const auto ns = g.node_types[e.src_type].count;
    const auto nd = g.node_types[e.dst_type].count;
    read_tsv(file, [&](std::size_t lineno, std::string_view a, std::string_view b) {
      std::uint32_t s, d;
      if (!parse_number(a, s) || !parse_number(b, d)) fail(file, lineno, "malformed edge row");
      if (s >= ns) {
        fail(file, lineno, "src id " + std::to_string(s) + " out of range for type " +
                               g.node_types[e.src_type].name + " (count " +
                               std::to_string(ns) + ")");
      }
      if (d >= nd) {
        fail(file, lineno, "dst id " + std::to_string(d) + " out of range for type " +
                               g.node_types[e.dst_type].name + " (count " +
                               std::to_string(nd) + ")");
      }
      e.edges.emplace_back(s, d);
    });
    g.edge_types.push_back(std::move(e));
  }

  g.target_type = type_of(manifest_get<std::string>(manifest, "target_type", manifest_path));
  g.num_classes = manifest_get<std::size_t>(manifest, "num_classes", manifest_path);
  const auto nt = g.num_targets();

  g.labels.assign(nt, -1);
  const fs::path labels_file = dir / manifest_get<std::string>(manifest, "labels_file", manifest_path);
  read_tsv(labels_file, [&](std::size_t lineno, std::string_view a, std::string_view b) {
    std::uint32_t id;
    int cls;
    if (!parse_number(a, id) || !parse_number(b, cls)) fail(labels_file, lineno, "malformed label row");
    if (id >= nt) fail(labels_file, lineno, "node id " + std::to_string(id) + " out of range");
    if (cls < 0 || static_cast<std::size_t>(cls) >= g.num_classes) {
      fail(labels_file, lineno, "class " + std::to_string(cls) + " outside [0, " +
                                    std::to_string(g.num_classes) + ")");
    }
    g.labels[id] = cls;
  });

  std::vector<bool> has_split(nt, false);
  g.splits.assign(nt, Split::kTest);
  const fs::path splits_file = dir / manifest_get<std::string>(manifest, "splits_file", manifest_path);
  read_tsv(splits_file, [&](std::size_t lineno, std::string_view a, std::string_view b) {
    std::uint32_t id;
    if (!parse_number(a, id)) fail(splits_file, lineno, "malformed split row");
    if (id >= nt) fail(splits_file, lineno, "node id " + std::to_string(id) + " out of range");
    std::string_view tagv = b;
    while (!tagv.empty() && tagv.back() == '\r') tagv.remove_suffix(1);
    if (!parse_split(tagv, g.splits[id])) {
      fail(splits_file, lineno, "unknown split '" + std::string(tagv) + "'");
    }
    has_split[id] = true;
  });
  for (std::size_t i = 0; i < nt; ++i) {
    if (!has_split[i]) fail(splits_file, 0, "target node " + std::to_string(i) + " has no split");
    if (g.labels[i] < 0) fail(labels_file, 0, "target node " + std::to_string(i) + " has no label");
  }

  if (auto diags = validate_graph(g); !diags.empty()) {
    std::string msg = "graph validation failed:";
    for (const auto& d : diags) msg += "\n  " + d.str();
    throw ValidationError(msg);
  }
  return g;
}

void export_dataset(const HeterogeneousGraph& g, const fs::path& dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["node_types"] = json::array();
  for (const auto& t : g.node_types) {
    const std::string file = "features_" + t.name + ".csv";
    manifest["node_types"].push_back({{"name", t.name},
                                      {"count", t.count},
                                      {"feature_dim", t.features.cols()},
                                      {"feature_file", file}});
    std::ofstream out(dir / file);
    std::string line;
    for (std::size_t r = 0; r < t.features.rows(); ++r) {
      line.clear();
      for (std::size_t c = 0; c < t.features.cols(); ++c) {
        if (c) line += ',';
        line += format_double(t.features(r, c));
      }
      out << line << '\n';
    }
  }
  manifest["edge_types"] = json::array();
  for (const auto& e : g.edge_types) {
    const std::string file = "edges_" + e.name + ".tsv";
    manifest["edge_types"].push_back({{"name", e.name},
                                      {"src_type", g.node_types[e.src_type].name},
                                      {"dst_type", g.node_types[e.dst_type].name},
                                      {"edge_file", file},
                                      {"undirected", e.undirected}});
    std::ofstream out(dir / file);
    for (const auto& [s, d] : e.edges) out << s << '\t' << d << '\n';
  }
  manifest["target_type"] = g.node_types[g.target_type].name;
  manifest["num_classes"] = g.num_classes;
  manifest["labels_file"] = "labels.tsv";
  manifest["splits_file"] = "splits.tsv";
  {
    std::ofstream out(dir / "labels.tsv");
    for (std::size_t i = 0; i < g.labels.size(); ++i) out << i << '\t' << g.labels[i] << '\n';
  }
  {
    std::ofstream out(dir / "splits.tsv");
    for (std::size_t i = 0; i < g.splits.size(); ++i) out << i << '\t' << split_name(g.splits[i]) << '\n';
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

}  // namespace hgens
