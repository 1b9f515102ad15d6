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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hgens {

/// Boolean sparse matrix, row-indexed. Row r owns
/// col_idx[row_ptr[r] .. row_ptr[r+1]), strictly increasing.
struct RelationAdjacency {
  std::size_t rows = 0;  // receiving nodes (n_t)
  std::size_t cols = 0;  // sending nodes (n_s)
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;

  std::span<const std::uint32_t> row(std::size_t r) const {
    return {col_idx.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }
  std::size_t degree(std::size_t r) const { return row_ptr[r + 1] - row_ptr[r]; }
  std::size_t nnz() const { return col_idx.size(); }
  bool contains(std::size_t r, std::size_t c) const;

  /// Throws StructureError if row_ptr/col_idx break the invariants.
  void check() const;

  /// Builds from unsorted (row, col) pairs; duplicates collapse.
  static RelationAdjacency from_pairs(std::size_t rows, std::size_t cols,
                                      std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs);

  RelationAdjacency transpose() const;

  /// Boolean product this * rhs.
  RelationAdjacency bool_product(const RelationAdjacency& rhs) const;

  friend bool operator==(const RelationAdjacency&, const RelationAdjacency&) = default;
};

/// Same pattern as a RelationAdjacency with a weight per stored entry.
struct NormalizedAdjacency {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return col_idx.size(); }

  static NormalizedAdjacency identity(std::size_t n);

  friend bool operator==(const NormalizedAdjacency&, const NormalizedAdjacency&) = default;
};

/// Row-normalizes by the receiving node's degree; empty rows stay empty.
NormalizedAdjacency normalize_adjacency(const RelationAdjacency& a);
/// Re-normalizes an already weighted matrix over its pattern.
NormalizedAdjacency normalize_adjacency(const NormalizedAdjacency& a);

}  // namespace hgens
