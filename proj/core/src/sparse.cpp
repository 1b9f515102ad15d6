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

#include "hgens/sparse.hpp"

#include <algorithm>
#include <string>

#include "hgens/error.hpp"

namespace hgens {

bool RelationAdjacency::contains(std::size_t r, std::size_t c) const {
  auto cols_of_r = row(r);
  return std::binary_search(cols_of_r.begin(), cols_of_r.end(), static_cast<std::uint32_t>(c));
}

void RelationAdjacency::check() const {
  if (row_ptr.size() != rows + 1 || row_ptr.front() != 0 || row_ptr.back() != col_idx.size()) {
    throw StructureError("adjacency: row_ptr inconsistent with shape");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) throw StructureError("adjacency: row_ptr not monotone");
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      if (col_idx[p] >= cols) {
        throw StructureError("adjacency: column " + std::to_string(col_idx[p]) +
                             " out of range in row " + std::to_string(r));
      }
      if (p > row_ptr[r] && col_idx[p] <= col_idx[p - 1]) {
        throw StructureError("adjacency: columns not strictly increasing in row " +
                             std::to_string(r));
      }
    }
  }
}

RelationAdjacency RelationAdjacency::from_pairs(
    std::size_t rows, std::size_t cols,
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  RelationAdjacency a;
  a.rows = rows;
  a.cols = cols;
  a.row_ptr.assign(rows + 1, 0);
  a.col_idx.reserve(pairs.size());
  for (const auto& [r, c] : pairs) {
    if (r >= rows || c >= cols) {
      throw StructureError("adjacency: pair (" + std::to_string(r) + "," + std::to_string(c) +
                           ") out of range");
    }
    ++a.row_ptr[r + 1];
    a.col_idx.push_back(c);
  }
  for (std::size_t r = 0; r < rows; ++r) a.row_ptr[r + 1] += a.row_ptr[r];
  return a;
}

RelationAdjacency RelationAdjacency::transpose() const {
  RelationAdjacency t;
  t.rows = cols;
  t.cols = rows;
  t.row_ptr.assign(cols + 1, 0);
  t.col_idx.resize(col_idx.size());
  for (auto c : col_idx) ++t.row_ptr[c + 1];
  for (std::size_t c = 0; c < cols; ++c) t.row_ptr[c + 1] += t.row_ptr[c];
  std::vector<std::size_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  // Rows visited in increasing order, so each transposed row comes out sorted.
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      t.col_idx[next[col_idx[p]]++] = static_cast<std::uint32_t>(r);
    }
  }
  return t;
}

RelationAdjacency RelationAdjacency::bool_product(const RelationAdjacency& rhs) const {
  if (cols != rhs.rows) {
    throw ShapeError("bool_product: inner dimensions " + std::to_string(cols) + " vs " +
                     std::to_string(rhs.rows));
  }
  RelationAdjacency out;
  out.rows = rows;
  out.cols = rhs.cols;
  out.row_ptr.assign(rows + 1, 0);
  std::vector<std::uint32_t> marker(rhs.cols, UINT32_MAX);
  std::vector<std::uint32_t> scratch;
  for (std::size_t r = 0; r < rows; ++r) {
    scratch.clear();
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      for (auto c : rhs.row(col_idx[p])) {
        if (marker[c] != r) {
          marker[c] = static_cast<std::uint32_t>(r);
          scratch.push_back(c);
        }
      }
    }
    std::sort(scratch.begin(), scratch.end());
    out.col_idx.insert(out.col_idx.end(), scratch.begin(), scratch.end());
    out.row_ptr[r + 1] = out.col_idx.size();
  }
  return out;
}

NormalizedAdjacency NormalizedAdjacency::identity(std::size_t n) {
  NormalizedAdjacency a;
  a.rows = a.cols = n;
  a.row_ptr.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) a.row_ptr[i] = i;
  a.col_idx.resize(n);
  for (std::size_t i = 0; i < n; ++i) a.col_idx[i] = static_cast<std::uint32_t>(i);
  a.values.assign(n, 1.0);
  return a;
}

NormalizedAdjacency normalize_adjacency(const RelationAdjacency& a) {
  NormalizedAdjacency n;
  n.rows = a.rows;
  n.cols = a.cols;
  n.row_ptr = a.row_ptr;
  n.col_idx = a.col_idx;
  n.values.resize(a.col_idx.size());
  for (std::size_t r = 0; r < a.rows; ++r) {
    const std::size_t deg = a.degree(r);
    if (deg == 0) continue;
    const double w = 1.0 / static_cast<double>(deg);
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) n.values[p] = w;
  }
  return n;
}

NormalizedAdjacency normalize_adjacency(const NormalizedAdjacency& a) {
  NormalizedAdjacency n = a;
  for (std::size_t r = 0; r < a.rows; ++r) {
    const std::size_t deg = a.row_ptr[r + 1] - a.row_ptr[r];
    if (deg == 0) continue;
    const double w = 1.0 / static_cast<double>(deg);
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) n.values[p] = w;
  }
  return n;
}

}  // namespace hgens
