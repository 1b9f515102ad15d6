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

#include "hgens/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "hgens/error.hpp"

namespace hgens {

using json = nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "hidden_dim", "num_layers", "dropout",   "fanout",         "batch_sizes",
    "relations",  "groups",     "lambda",    "lr",             "weight_decay",
    "max_epochs", "patience",   "seed",      "attention",      "regularizer",
    "fusion",     "attn_dim",   "group_attn_dim", "exclude_diagonal", "eval_seed",
    "threads",    "unsafe_hparams"};

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

TrainConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.contains(key)) throw ValidationError("unknown config key '" + key + "'");
  }
  TrainConfig c;
  read(j, "hidden_dim", c.hidden_dim);
  read(j, "num_layers", c.num_layers);
  read(j, "dropout", c.dropout);
  read(j, "fanout", c.fanout);
  read(j, "batch_sizes", c.batch_sizes);
  read(j, "lambda", c.lambda);
  read(j, "lr", c.lr);
  read(j, "weight_decay", c.weight_decay);
  read(j, "max_epochs", c.max_epochs);
  read(j, "patience", c.patience);
  read(j, "seed", c.seed);
  read(j, "regularizer", c.regularizer);
  read(j, "attn_dim", c.attn_dim);
  read(j, "group_attn_dim", c.group_attn_dim);
  read(j, "exclude_diagonal", c.exclude_diagonal);
  read(j, "eval_seed", c.eval_seed);
  read(j, "threads", c.threads);
  read(j, "unsafe_hparams", c.unsafe_hparams);
  if (j.contains("attention")) {
    std::string mode;
    read(j, "attention", mode);
    if (mode == "minmax") {
      c.attention = AttentionMode::kMinMax;
    } else if (mode == "softmax") {
      c.attention = AttentionMode::kSoftmax;
    } else {
      throw ValidationError("attention must be 'minmax' or 'softmax', got '" + mode + "'");
    }
  }
  if (j.contains("fusion")) {
    std::string mode;
    read(j, "fusion", mode);
    if (mode == "attention") {
      c.fusion = FusionMode::kAttention;
    } else if (mode == "naive") {
      c.fusion = FusionMode::kNaive;
    } else {
      throw ValidationError("fusion must be 'attention' or 'naive', got '" + mode + "'");
    }
  }
  if (j.contains("relations")) {
    const auto& rels = j.at("relations");
    if (!rels.is_array()) throw ValidationError("config key 'relations' must be a list");
    for (const auto& r : rels) {
      RelationSpec spec;
      read(r, "name", spec.name);
      read(r, "path", spec.path);
      read(r, "exclude_self", spec.exclude_self);
      c.relations.push_back(std::move(spec));
    }
  }
  if (j.contains("groups")) {
    const auto& groups = j.at("groups");
    if (!groups.is_array()) throw ValidationError("config key 'groups' must be a list");
    for (const auto& g : groups) {
      GroupSpec spec;
      read(g, "name", spec.name);
      read(g, "relations", spec.relations);
      c.groups.push_back(std::move(spec));
    }
  }
  return c;
}

json config_to_json(const TrainConfig& c) {
  json j;
  j["hidden_dim"] = c.hidden_dim;
  j["num_layers"] = c.num_layers;
  j["dropout"] = c.dropout;
  j["fanout"] = c.fanout;
  j["batch_sizes"] = c.batch_sizes;
  j["relations"] = json::array();
  for (const auto& r : c.relations) {
    j["relations"].push_back({{"name", r.name}, {"path", r.path}, {"exclude_self", r.exclude_self}});
  }
  j["groups"] = json::array();
  for (const auto& g : c.groups) j["groups"].push_back({{"name", g.name}, {"relations", g.relations}});
  j["lambda"] = c.lambda;
  j["lr"] = c.lr;
  j["weight_decay"] = c.weight_decay;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["seed"] = c.seed;
  j["attention"] = c.attention == AttentionMode::kMinMax ? "minmax" : "softmax";
  j["regularizer"] = c.regularizer;
  j["fusion"] = c.fusion == FusionMode::kAttention ? "attention" : "naive";
  j["attn_dim"] = c.attn_dim;
  j["group_attn_dim"] = c.group_attn_dim;
  j["exclude_diagonal"] = c.exclude_diagonal;
  j["eval_seed"] = c.eval_seed;
  j["threads"] = c.threads;
  j["unsafe_hparams"] = c.unsafe_hparams;
  return j;
}

TrainConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  json j = json::object();
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open config " + file.string());
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError("config " + file.string() + ": " + e.what());
    }
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError("override '" + ov + "' is not key=value");
    }
    std::string key = ov.substr(0, eq);
    const std::string value = ov.substr(eq + 1);
    std::replace(key.begin(), key.end(), '-', '_');
    json parsed = json::parse(value, nullptr, false);
    j[key] = parsed.is_discarded() ? json(value) : parsed;
  }
  return config_from_json(j);
}

void validate_config(const TrainConfig& c) {
  auto in = [](auto v, std::initializer_list<decltype(v)> allowed) {
    return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
  };
  if (!c.unsafe_hparams) {
    if (!in(c.hidden_dim, {32, 64, 128})) {
      throw ValidationError("hidden_dim must be one of 32/64/128 (set unsafe_hparams to override)");
    }
    if (!in(c.num_layers, {2, 3})) {
      throw ValidationError("num_layers must be 2 or 3 (set unsafe_hparams to override)");
    }
    if (!in(c.dropout, {0.0, 0.1, 0.2})) {
      throw ValidationError("dropout must be one of 0/0.1/0.2 (set unsafe_hparams to override)");
    }
    if (!in(c.fanout, {10, 15, 20})) {
      throw ValidationError("fanout must be one of 10/15/20 (set unsafe_hparams to override)");
    }
  }
  if (c.hidden_dim == 0 || c.num_layers == 0 || c.fanout == 0 || c.attn_dim == 0 ||
      c.group_attn_dim == 0) {
    throw ValidationError("dimensions, layer count and fanout must be >= 1");
  }
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ValidationError("dropout must lie in [0, 1)");
  if (c.batch_sizes.empty()) throw ValidationError("batch_sizes must be non-empty");
  for (auto b : c.batch_sizes) {
    if (b == 0) throw ValidationError("batch sizes must be >= 1");
  }
  if (!(c.lr > 0.0)) throw ValidationError("lr must be > 0");
  if (c.weight_decay < 0.0 || c.lambda < 0.0) throw ValidationError("lambda and weight_decay must be >= 0");
  if (c.max_epochs == 0) throw ValidationError("max_epochs must be >= 1");
  if (c.threads == 0) throw ValidationError("threads must be >= 1");
}

std::vector<PreparedGroup> resolve_groups(const TrainConfig& c, const HeterogeneousGraph& g) {
  std::vector<Relation> relations;
  if (c.relations.empty()) {
    relations = default_metapath_relations(g);
  } else {
    for (const auto& spec : c.relations) {
      relations.push_back(make_relation(g, spec.name, spec.path, spec.exclude_self));
    }
  }
  if (relations.empty()) throw StructureError("no relations end at the target type");
  std::map<std::string, const Relation*> by_name;
  for (const auto& r : relations) {
    if (!by_name.emplace(r.name, &r).second) throw StructureError("duplicate relation '" + r.name + "'");
  }
  std::vector<RelationGroup> groups;
  if (c.groups.empty()) {
    for (const auto& r : relations) groups.push_back({r.name, {r}});
  } else {
    for (const auto& spec : c.groups) {
      RelationGroup grp{spec.name, {}};
      for (const auto& name : spec.relations) {
        auto it = by_name.find(name);
        if (it == by_name.end()) {
          throw StructureError("group '" + spec.name + "' names unknown relation '" + name + "'");
        }
        grp.relations.push_back(*it->second);
      }
      groups.push_back(std::move(grp));
    }
  }
  std::vector<PreparedGroup> out;
  for (auto& grp : groups) out.push_back(prepare_group(g, std::move(grp)));
  return out;
}

}  // namespace hgens
