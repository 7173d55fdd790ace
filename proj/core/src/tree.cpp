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
#include "hodlrmp/tree.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace hodlrmp {

ClusterTree::ClusterTree(std::size_t n, int depth) : n_(n), depth_(depth) {
  if (n == 0) throw std::invalid_argument("tree dimension must be positive");
  if (depth < 0) throw std::invalid_argument("tree depth must be nonnegative");
  if (depth >= 63 || (std::size_t{1} << depth) > n) throw std::invalid_argument("tree too deep for dimension");

  levels_.resize(depth + 1);
  levels_[0] = {IndexRange{0, n}};
  for (int k = 0; k < depth; ++k) {
    auto& next = levels_[k + 1];
    next.reserve(levels_[k].size() * 2);
    for (const auto& r : levels_[k]) {
      const std::size_t left = (r.size() + 1) / 2;
      next.push_back({r.begin, r.begin + left});
      next.push_back({r.begin + left, r.end});
    }
  }
}

const std::vector<IndexRange>& ClusterTree::level_blocks(int level) const {
  if (level < 0 || level > depth_)
    throw std::out_of_range("level " + std::to_string(level) + " outside [0, " + std::to_string(depth_) + "]");
  return levels_[level];
}

int ClusterTree::level_of(std::size_t id) { return std::bit_width(id + 1) - 1; }

ClusterTree build_tree(std::size_t n, int depth) { return ClusterTree(n, depth); }

int depth_for_min_leaf(std::size_t n, std::size_t min_leaf) {
  if (min_leaf == 0 || n < min_leaf) throw std::invalid_argument("minimum leaf size must lie in [1, n]");
  int depth = 0;
  while ((n >> (depth + 1)) >= min_leaf) ++depth;
  return depth;
}

}  // namespace hodlrmp
