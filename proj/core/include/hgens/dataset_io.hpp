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

#pragma once

#include <filesystem>

#include "hgens/graph.hpp"

namespace hgens {

/// Loads an HGT directory: manifest.json plus the CSV/TSV files it names.
///
/// manifest.json keys: node_types [{name, count, feature_dim, feature_file}],
/// edge_types [{name, src_type, dst_type, edge_file, undirected}],
/// target_type, num_classes, labels_file, splits_file.
///
/// Any problem raises ValidationError whose message names the file and the
/// 1-based line.
HeterogeneousGraph load_dataset(const std::filesystem::path& dir);

/// Writes `g` in the same format. Features use 17 significant digits so a
/// reload is bit-exact.
void export_dataset(const HeterogeneousGraph& g, const std::filesystem::path& dir);

}  // namespace hgens
