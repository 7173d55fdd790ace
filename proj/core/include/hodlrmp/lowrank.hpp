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

#include <Eigen/Dense>

#include "hodlrmp/fpsim.hpp"

namespace hodlrmp {

/// Factored block U * V^T with U (rows x r), V (cols x r).
///
/// Entries of U and V are exactly representable in `format`. Factors
/// produced by truncation carry orthonormal U and singular values folded
/// into V.
struct LowRankFactor {
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
  PrecisionFormat format = formats::fp64();

  LowRankFactor() = default;
  LowRankFactor(Eigen::MatrixXd u, Eigen::MatrixXd v, PrecisionFormat fmt = formats::fp64());
  static LowRankFactor zero(Eigen::Index rows, Eigen::Index cols, PrecisionFormat fmt = formats::fp64());

  Eigen::Index rows() const { return U.rows(); }
  Eigen::Index cols() const { return V.rows(); }
  Eigen::Index rank() const { return U.cols(); }

  Eigen::MatrixXd dense() const;
  LowRankFactor negated() const;
  /// Restriction to a sub-block; rank unchanged.
  LowRankFactor block(Eigen::Index row0, Eigen::Index nrows, Eigen::Index col0, Eigen::Index ncols) const;
};

double frobenius_norm(const LowRankFactor& f);

/// Singular-value tail truncation rank: smallest r with
/// sqrt(sum_{i>=r} s_i^2) <= eps * ||s||_2. For eps == 0 keeps every
/// singular value above n * u64 * s_0.
Eigen::Index truncation_rank(const Eigen::VectorXd& singular_values, double eps, Eigen::Index n);

/// Truncated SVD of a dense block to relative Frobenius tolerance eps.
LowRankFactor truncate_block(const Eigen::MatrixXd& block, double eps);

/// Full SVD of a block, reusable for several tolerances.
struct BlockSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd S;
  Eigen::MatrixXd V;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  double frobenius = 0.0;

  LowRankFactor truncate(double eps) const;
};

BlockSvd compute_block_svd(const Eigen::MatrixXd& block);

/// Round U and V into fmt.
LowRankFactor store_factor(const LowRankFactor& f, const PrecisionFormat& fmt);

/// a + b recompressed to relative Frobenius tolerance eps (QR of the
/// stacked bases, SVD of the small core).
LowRankFactor recompress_sum(const LowRankFactor& a, const LowRankFactor& b, double eps);

/// Recompress a single factor (equivalent to recompress_sum with a zero).
LowRankFactor recompress(const LowRankFactor& a, double eps);

/// a * b as a factor of rank <= min(rank a, rank b).
LowRankFactor factor_product(const LowRankFactor& a, const LowRankFactor& b);

}  // namespace hodlrmp
