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
#include <doctest.h>

#include "hodlrmp/tree.hpp"
#include "oracles.hpp"

using namespace hodlrmp;

TEST_CASE("balanced tree levels") {
  const auto t = build_tree(8, 2);
  CHECK(t.level_blocks(0) == std::vector<IndexRange>{{0, 8}});
  CHECK(t.level_blocks(1) == std::vector<IndexRange>{{0, 4}, {4, 8}});
  CHECK(t.level_blocks(2) == std::vector<IndexRange>{{0, 2}, {2, 4}, {4, 6}, {6, 8}});
  CHECK(t.leaf_count() == 4);
  CHECK(t.node_count() == 7);
  CHECK_THROWS_AS(t.level_blocks(3), std::out_of_range);
}

TEST_CASE("left child takes the ceiling") {
  const auto t = build_tree(7, 1);
  CHECK(t.level_blocks(1) == std::vector<IndexRange>{{0, 4}, {4, 7}});
}

TEST_CASE("n = 2000 at depth 8 has leaves of size 7 or 8") {
  const auto t = build_tree(2000, 8);
  std::vector<std::size_t> expect;
  oracle::leaf_sizes(2000, 8, expect);
  const auto& leaves = t.level_blocks(8);
  REQUIRE(leaves.size() == expect.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    CHECK(leaves[i].size() == expect[i]);
    CHECK((leaves[i].size() == 7 || leaves[i].size() == 8));
  }
}

TEST_CASE("invalid trees") {
  CHECK_THROWS(build_tree(0, 0));
  CHECK_THROWS(build_tree(4, -1));
  CHECK_THROWS(build_tree(4, 3));
  CHECK_NOTHROW(build_tree(4, 2));
  CHECK_NOTHROW(build_tree(1, 0));
}

TEST_CASE("heap ids") {
  CHECK(ClusterTree::node_id(0, 0) == 0);
  CHECK(ClusterTree::node_id(2, 3) == 6);
  for (std::size_t id = 0; id < 63; ++id) {
    const int k = ClusterTree::level_of(id);
    CHECK(ClusterTree::node_id(k, ClusterTree::index_of(id)) == id);
    CHECK(ClusterTree::level_of(ClusterTree::left_child(id)) == k + 1);
  }
}

TEST_CASE("tree partition properties over many sizes") {
  for (std::size_t n = 1; n <= 300; n += 7) {
    for (int depth = 0; (std::size_t{1} << depth) <= n && depth <= 6; ++depth) {
      CAPTURE(n);
      CAPTURE(depth);
      const auto t = build_tree(n, depth);
      for (int k = 0; k <= depth; ++k) {
        const auto& blocks = t.level_blocks(k);
        REQUIRE(blocks.size() == (std::size_t{1} << k));
        CHECK(blocks.front().begin == 0);
        CHECK(blocks.back().end == n);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
          CHECK(blocks[i].size() >= 1);
          if (i + 1 < blocks.size()) CHECK(blocks[i].end == blocks[i + 1].begin);
          if (k < depth) {
            const auto& l = t.range(k + 1, 2 * i);
            const auto& r = t.range(k + 1, 2 * i + 1);
            CHECK(l.begin == blocks[i].begin);
            CHECK(r.end == blocks[i].end);
            CHECK(l.size() == (blocks[i].size() + 1) / 2);
          }
        }
      }
    }
  }
}

TEST_CASE("depth_for_min_leaf") {
  CHECK(depth_for_min_leaf(2000, 7) == 8);
  CHECK(depth_for_min_leaf(2000, 8) == 7);
  CHECK(depth_for_min_leaf(8, 1) == 3);
  CHECK(depth_for_min_leaf(3, 3) == 0);
  CHECK_THROWS(depth_for_min_leaf(3, 4));
}
