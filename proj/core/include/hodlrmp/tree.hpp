/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <vector>

namespace hodlrmp {

/// Half-open index interval [begin, end), 0-based.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const IndexRange&) const = default;
};

/// Balanced binary cluster tree over {0, ..., n-1}.
///
/// Nodes are addressed by (level, index) or by a heap id
/// id = 2^level - 1 + index; children of id are 2id+1 and 2id+2.
/// Every split gives the left child ceil(m/2) indices.
class ClusterTree {
 public:
  ClusterTree() = default;
  ClusterTree(std::size_t n, int depth);

  std::size_t n() const { return n_; }
  int depth() const { return depth_; }

  const std::vector<IndexRange>& level_blocks(int level) const;
  const IndexRange& range(int level, std::size_t index) const { return levels_.at(level).at(index); }

  std::size_t node_count() const { return (std::size_t{1} << (depth_ + 1)) - 1; }
  std::size_t leaf_count() const { return std::size_t{1} << depth_; }

  static std::size_t node_id(int level, std::size_t index) { return (std::size_t{1} << level) - 1 + index; }
  static int level_of(std::size_t id);
  static std::size_t index_of(std::size_t id) { return id + 1 - (std::size_t{1} << level_of(id)); }
  static std::size_t left_child(std::size_t id) { return 2 * id + 1; }
  static std::size_t right_child(std::size_t id) { return 2 * id + 2; }

  const IndexRange& node_range(std::size_t id) const { return range(level_of(id), index_of(id)); }
  bool is_leaf(std::size_t id) const { return level_of(id) == depth_; }

  bool operator==(const ClusterTree&) const = default;

 private:
  std::size_t n_ = 0;
  int depth_ = 0;
  std::vector<std::vector<IndexRange>> levels_;
};

ClusterTree build_tree(std::size_t n, int depth);

/// Largest depth whose smallest leaf (floor(n / 2^depth)) still has at least
/// `min_leaf` indices.
int depth_for_min_leaf(std::size_t n, std::size_t min_leaf);

}  // namespace hodlrmp
