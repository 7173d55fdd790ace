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
#include "hodlrmp/hodlr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hodlrmp {

namespace {

void check_square(const Eigen::MatrixXd& a, const ClusterTree& tree) {
  if (a.rows() != a.cols()) throw std::invalid_argument("HODLR input must be square");
  if (static_cast<std::size_t>(a.rows()) != tree.n())
    throw std::invalid_argument("matrix dimension " + std::to_string(a.rows()) + " does not match tree dimension " +
                                std::to_string(tree.n()));
}

Eigen::Index as_index(std::size_t v) { return static_cast<Eigen::Index>(v); }

HodlrMatrix assemble(const CompressionCache& cache, double eps, PrecisionPlan plan, const PrecisionFormat& working) {
  const ClusterTree& tree = cache.tree();
  HodlrMatrix h;
  h.tree = tree;
  h.eps = eps;
  h.working_format = working;
  h.upper.resize(tree.node_count());
  h.lower.resize(tree.node_count());
  h.leaves.resize(tree.leaf_count());

  for (int k = 0; k < tree.depth(); ++k) {
    const PrecisionFormat& fmt = plan.levels[k].chosen;
    for (std::size_t i = 0; i < (std::size_t{1} << k); ++i) {
      const std::size_t id = ClusterTree::node_id(k, i);
      h.upper[id] = store_factor(cache.upper(id).truncate(eps), fmt);
      h.lower[id] = store_factor(cache.lower(id).truncate(eps), fmt);
    }
  }
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) h.leaves[i] = round_matrix(cache.leaf(i), working);
  h.plan = std::move(plan);
  return h;
}

double xi_for_level(const CompressionCache& cache, int level) {
  const double all = cache.total_norm_sq();
  if (all == 0.0) return 0.0;
  return std::sqrt(cache.level_max_norm_sq(level) / all);
}

}  // namespace

bool PrecisionPlan::certified() const {
  return std::none_of(levels.begin(), levels.end(), [](const LevelPrecision& l) { return l.fallback; });
}

std::vector<std::string> PrecisionPlan::chosen_names() const {
  std::vector<std::string> names;
  for (const auto& l : levels) names.push_back(l.chosen.name);
  return names;
}

std::vector<double> level_max_norms_sq(const Eigen::MatrixXd& a, const ClusterTree& tree) {
  check_square(a, tree);
  std::vector<double> out(tree.depth() + 1, 0.0);
  for (int k = 1; k <= tree.depth(); ++k) {
    const auto& blocks = tree.level_blocks(k);
    for (std::size_t i = 0; i + 1 < blocks.size(); i += 2) {
      const auto& r0 = blocks[i];
      const auto& r1 = blocks[i + 1];
      const double up = a.block(as_index(r0.begin), as_index(r1.begin), as_index(r0.size()), as_index(r1.size())).squaredNorm();
      const double lo = a.block(as_index(r1.begin), as_index(r0.begin), as_index(r1.size()), as_index(r0.size())).squaredNorm();
      out[k] = std::max({out[k], up, lo});
    }
  }
  return out;
}

CompressionCache::CompressionCache(const Eigen::MatrixXd& a, const ClusterTree& tree) : tree_(tree) {
  check_square(a, tree);
  if (!a.allFinite()) throw std::invalid_argument("HODLR input contains non-finite entries");
  total_norm_sq_ = a.squaredNorm();
  level_max_sq_ = level_max_norms_sq(a, tree);
  upper_.resize(tree.node_count());
  lower_.resize(tree.node_count());
  for (int k = 0; k < tree.depth(); ++k) {
    for (std::size_t i = 0; i < (std::size_t{1} << k); ++i) {
      const std::size_t id = ClusterTree::node_id(k, i);
      const auto& r0 = tree.node_range(ClusterTree::left_child(id));
      const auto& r1 = tree.node_range(ClusterTree::right_child(id));
      upper_[id] = compute_block_svd(
          a.block(as_index(r0.begin), as_index(r1.begin), as_index(r0.size()), as_index(r1.size())));
      lower_[id] = compute_block_svd(
          a.block(as_index(r1.begin), as_index(r0.begin), as_index(r1.size()), as_index(r0.size())));
    }
  }
  for (const auto& r : tree.level_blocks(tree.depth()))
    leaves_.push_back(a.block(as_index(r.begin), as_index(r.begin), as_index(r.size()), as_index(r.size())));
}

double admissible_roundoff(int level, double eps, double xi) {
  if (xi <= 0.0) return std::numeric_limits<double>::infinity();
  return eps / (std::pow(2.0, 0.5 * level) * xi);
}

LevelPrecision choose_precision(int level, double eps, double xi, const PrecisionFormat& working,
                                const std::vector<PrecisionFormat>& available) {
  LevelPrecision out;
  out.xi = xi;
  out.threshold = admissible_roundoff(level, eps, xi);

  const PrecisionFormat* best = nullptr;
  auto consider = [&](const PrecisionFormat& f) {
    if (f.unit_roundoff() > out.threshold) return;
    if (best == nullptr || f.unit_roundoff() > best->unit_roundoff() ||
        (f.unit_roundoff() == best->unit_roundoff() && f.bits < best->bits))
      best = &f;
  };
  consider(working);
  for (const auto& f : available) consider(f);

  if (best == nullptr) {
    out.chosen = working;
    out.fallback = true;
  } else {
    out.chosen = *best;
  }
  return out;
}

HodlrMatrix build_uniform(const CompressionCache& cache, double eps,
                          const std::vector<PrecisionFormat>& level_formats, const PrecisionFormat& working) {
  const int depth = cache.tree().depth();
  if (level_formats.size() != static_cast<std::size_t>(depth))
    throw std::invalid_argument("expected " + std::to_string(depth) + " level formats, got " +
                                std::to_string(level_formats.size()));
  validate(working);
  PrecisionPlan plan;
  for (int k = 1; k <= depth; ++k) {
    validate(level_formats[k - 1]);
    LevelPrecision lp;
    lp.xi = xi_for_level(cache, k);
    lp.threshold = admissible_roundoff(k, eps, lp.xi);
    lp.chosen = level_formats[k - 1];
    plan.levels.push_back(lp);
  }
  return assemble(cache, eps, std::move(plan), working);
}

HodlrMatrix build_uniform(const Eigen::MatrixXd& a, const ClusterTree& tree, double eps,
                          const std::vector<PrecisionFormat>& level_formats, const PrecisionFormat& working) {
  check_square(a, tree);
  if (level_formats.size() != static_cast<std::size_t>(tree.depth()))
    throw std::invalid_argument("expected " + std::to_string(tree.depth()) + " level formats");
  return build_uniform(CompressionCache(a, tree), eps, level_formats, working);
}

HodlrMatrix build_adaptive(const CompressionCache& cache, double eps, const PrecisionFormat& working,
                           const std::vector<PrecisionFormat>& available) {
  if (available.empty()) throw std::invalid_argument("available format set is empty");
  validate(working);
  for (const auto& f : available) validate(f);
  PrecisionPlan plan;
  for (int k = 1; k <= cache.tree().depth(); ++k)
    plan.levels.push_back(choose_precision(k, eps, xi_for_level(cache, k), working, available));
  return assemble(cache, eps, std::move(plan), working);
}

HodlrMatrix build_adaptive(const Eigen::MatrixXd& a, const ClusterTree& tree, double eps,
                           const PrecisionFormat& working, const std::vector<PrecisionFormat>& available) {
  if (available.empty()) throw std::invalid_argument("available format set is empty");
  return build_adaptive(CompressionCache(a, tree), eps, working, available);
}

Eigen::MatrixXd reconstruct_node(const HodlrMatrix& h, std::size_t id) {
  const auto& range = h.tree.node_range(id);
  if (h.tree.is_leaf(id)) return h.leaves[h.leaf_index(id)];
  const std::size_t c0 = ClusterTree::left_child(id), c1 = ClusterTree::right_child(id);
  const Eigen::Index n0 = as_index(h.tree.node_range(c0).size());
  const Eigen::Index n1 = as_index(h.tree.node_range(c1).size());
  Eigen::MatrixXd out(as_index(range.size()), as_index(range.size()));
  out.topLeftCorner(n0, n0) = reconstruct_node(h, c0);
  out.bottomRightCorner(n1, n1) = reconstruct_node(h, c1);
  out.topRightCorner(n0, n1) = h.upper[id].dense();
  out.bottomLeftCorner(n1, n0) = h.lower[id].dense();
  return out;
}

Eigen::MatrixXd reconstruct_dense(const HodlrMatrix& h) { return reconstruct_node(h, 0); }

std::uint64_t storage_bits(const HodlrMatrix& h) {
  std::uint64_t bits = 0;
  for (int k = 0; k < h.depth(); ++k) {
    for (std::size_t i = 0; i < (std::size_t{1} << k); ++i) {
      const std::size_t id = ClusterTree::node_id(k, i);
      for (const LowRankFactor* f : {&h.upper[id], &h.lower[id]})
        bits += static_cast<std::uint64_t>(f->rows() + f->cols()) * static_cast<std::uint64_t>(f->rank()) *
                static_cast<std::uint64_t>(bits_per_scalar(f->format));
    }
  }
  const auto leaf_bits = static_cast<std::uint64_t>(bits_per_scalar(h.working_format));
  for (const auto& d : h.leaves) bits += static_cast<std::uint64_t>(d.size()) * leaf_bits;
  return bits;
}

Eigen::Index max_rank(const HodlrMatrix& h) {
  Eigen::Index p = 0;
  for (std::size_t id = 0; id + h.tree.leaf_count() < h.tree.node_count(); ++id)
    p = std::max({p, h.upper[id].rank(), h.lower[id].rank()});
  return p;
}

void validate(const HodlrMatrix& h) {
  const auto& t = h.tree;
  if (h.leaves.size() != t.leaf_count()) throw std::logic_error("leaf count does not match tree");
  if (h.upper.size() != t.node_count() || h.lower.size() != t.node_count())
    throw std::logic_error("branch storage does not match tree");
  if (h.plan.levels.size() != static_cast<std::size_t>(t.depth())) throw std::logic_error("plan depth mismatch");
  for (std::size_t i = 0; i < t.leaf_count(); ++i) {
    const auto n = as_index(t.range(t.depth(), i).size());
    if (h.leaves[i].rows() != n || h.leaves[i].cols() != n) throw std::logic_error("leaf shape mismatch");
  }
  for (int k = 0; k < t.depth(); ++k) {
    for (std::size_t i = 0; i < (std::size_t{1} << k); ++i) {
      const std::size_t id = ClusterTree::node_id(k, i);
      const auto n0 = as_index(t.node_range(ClusterTree::left_child(id)).size());
      const auto n1 = as_index(t.node_range(ClusterTree::right_child(id)).size());
      const auto& up = h.upper[id];
      const auto& lo = h.lower[id];
      if (up.rows() != n0 || up.cols() != n1 || lo.rows() != n1 || lo.cols() != n0)
        throw std::logic_error("off-diagonal factor shape mismatch at node " + std::to_string(id));
      if (!(up.format == h.plan.levels[k].chosen) || !(lo.format == h.plan.levels[k].chosen))
        throw std::logic_error("factor format differs from plan at level " + std::to_string(k + 1));
    }
  }
}

}  // namespace hodlrmp
