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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hodlrmp/fpsim.hpp"
#include "hodlrmp/lowrank.hpp"
#include "hodlrmp/tree.hpp"

namespace hodlrmp {

/// Per-level storage precision choice.
struct LevelPrecision {
  double xi = 0.0;         // max off-diagonal block norm / ||A||_F
  double threshold = 0.0;  // admissible unit roundoff eps / (2^(k/2) xi)
  PrecisionFormat chosen = formats::fp64();
  bool fallback = false;   // no candidate met the threshold
};

/// levels[k-1] describes tree level k = 1..depth.
struct PrecisionPlan {
  std::vector<LevelPrecision> levels;

  bool certified() const;
  std::vector<std::string> chosen_names() const;
};

/// HODLR matrix with per-level factor formats.
///
/// Blocks are addressed through the cluster tree's heap ids: for a branch
/// node id, `upper[id]` is the block (left child rows, right child cols)
/// and `lower[id]` the block (right child rows, left child cols). Leaves
/// are indexed 0..2^depth-1 left to right. Branch vectors are sized
/// tree.node_count() and unused for leaf ids.
struct HodlrMatrix {
  ClusterTree tree;
  std::vector<Eigen::MatrixXd> leaves;
  std::vector<LowRankFactor> upper;
  std::vector<LowRankFactor> lower;
  double eps = 0.0;
  PrecisionPlan plan;
  PrecisionFormat working_format = formats::fp64();

  std::size_t n() const { return tree.n(); }
  int depth() const { return tree.depth(); }
  std::size_t leaf_index(std::size_t id) const { return ClusterTree::index_of(id); }
};

/// Full SVDs of every off-diagonal block of A for a fixed tree, so builds
/// at several tolerances share one decomposition.
class CompressionCache {
 public:
  CompressionCache(const Eigen::MatrixXd& a, const ClusterTree& tree);

  const ClusterTree& tree() const { return tree_; }
  double total_norm_sq() const { return total_norm_sq_; }
  const BlockSvd& upper(std::size_t id) const { return upper_.at(id); }
  const BlockSvd& lower(std::size_t id) const { return lower_.at(id); }
  /// max ||H_ij^(k)||_F^2 over the level-k off-diagonal blocks (k >= 1)
  double level_max_norm_sq(int level) const { return level_max_sq_.at(level); }
  /// Leaf diagonal blocks of A in binary64.
  const Eigen::MatrixXd& leaf(std::size_t i) const { return leaves_.at(i); }

 private:
  ClusterTree tree_;
  std::vector<Eigen::MatrixXd> leaves_;
  double total_norm_sq_ = 0.0;
  std::vector<BlockSvd> upper_;
  std::vector<BlockSvd> lower_;
  std::vector<double> level_max_sq_;
};

/// max ||H_ij^(k)||_F^2 over level-k sibling off-diagonal blocks, k = 1..depth
/// (entry 0 unused).
std::vector<double> level_max_norms_sq(const Eigen::MatrixXd& a, const ClusterTree& tree);

double admissible_roundoff(int level, double eps, double xi);

/// Largest unit roundoff <= threshold among {working} U available; falls
/// back to working when none qualifies.
LevelPrecision choose_precision(int level, double eps, double xi, const PrecisionFormat& working,
                                const std::vector<PrecisionFormat>& available);

/// Fixed per-level storage formats. `level_formats[k-1]` is used for level k.
HodlrMatrix build_uniform(const Eigen::MatrixXd& a, const ClusterTree& tree, double eps,
                          const std::vector<PrecisionFormat>& level_formats, const PrecisionFormat& working);
HodlrMatrix build_uniform(const CompressionCache& cache, double eps,
                          const std::vector<PrecisionFormat>& level_formats, const PrecisionFormat& working);

/// Per-level formats chosen from the block norm ratios.
HodlrMatrix build_adaptive(const Eigen::MatrixXd& a, const ClusterTree& tree, double eps,
                           const PrecisionFormat& working, const std::vector<PrecisionFormat>& available);
HodlrMatrix build_adaptive(const CompressionCache& cache, double eps, const PrecisionFormat& working,
                           const std::vector<PrecisionFormat>& available);

Eigen::MatrixXd reconstruct_dense(const HodlrMatrix& h);
/// Dense diagonal block of node `id`.
Eigen::MatrixXd reconstruct_node(const HodlrMatrix& h, std::size_t id);

std::uint64_t storage_bits(const HodlrMatrix& h);
Eigen::Index max_rank(const HodlrMatrix& h);

/// Checks structural invariants; throws std::logic_error on violation.
void validate(const HodlrMatrix& h);

// Binary container, see docs/hodlr-format.md.
constexpr std::uint32_t kHodlrFormatVersion = 1;
void save_hodlr(const HodlrMatrix& h, std::ostream& out);
HodlrMatrix load_hodlr(std::istream& in);
void save_hodlr(const HodlrMatrix& h, const std::string& path);
HodlrMatrix load_hodlr(const std::string& path);

}  // namespace hodlrmp
