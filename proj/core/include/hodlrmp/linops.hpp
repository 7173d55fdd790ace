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
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hodlrmp/fpsim.hpp"
#include "hodlrmp/hodlr.hpp"
#include "hodlrmp/lowrank.hpp"
#include "hodlrmp/tree.hpp"

namespace hodlrmp {

/// Raised when unpivoted LU meets a pivot below the guard.
class PivotBreakdown : public std::runtime_error {
 public:
  PivotBreakdown(std::size_t leaf, std::size_t row, double pivot, double tol);

  std::size_t leaf() const { return leaf_; }
  std::size_t row() const { return row_; }

 private:
  std::size_t leaf_;
  std::size_t row_;
};

enum class Triangle { lower, upper };

/// HODLR-triangular matrix: dense triangular leaves plus the low-rank
/// blocks on one side of the diagonal. For `lower`, leaves are unit lower
/// triangular and offdiag[id] is the (right rows, left cols) block; for
/// `upper`, leaves are upper triangular and offdiag[id] is the
/// (left rows, right cols) block.
struct HodlrTriangular {
  Triangle kind = Triangle::lower;
  ClusterTree tree;
  std::vector<Eigen::MatrixXd> leaves;
  std::vector<LowRankFactor> offdiag;

  std::size_t n() const { return tree.n(); }
};

struct HodlrLuFactors {
  HodlrTriangular L;
  HodlrTriangular U;
  PrecisionFormat working_format = formats::fp64();
  ArithMode mode = ArithMode::full_arithmetic;
};

struct LuOptions {
  ArithMode mode = ArithMode::full_arithmetic;
  /// Absolute pivot guard; negative selects leaf_size * u64 * ||leaf||_F.
  double pivot_tol = -1.0;
};

/// b = H x by the level sweep: off-diagonal contributions level by level
/// (V^T x before U), leaf blocks last.
Eigen::VectorXd matvec(const HodlrMatrix& h, const Eigen::VectorXd& x, const PrecisionFormat& working,
                       ArithMode mode = ArithMode::full_arithmetic);

HodlrLuFactors lu(const HodlrMatrix& h, double eps, const PrecisionFormat& working, const LuOptions& opts = {});

/// Solve L X = B with L HODLR unit-lower triangular.
Eigen::MatrixXd solve_lower(const HodlrTriangular& l, const Eigen::MatrixXd& b, const Arith& arith,
                            std::size_t node = 0);
/// Low-rank right-hand side: solves only against B's column basis; rank kept.
LowRankFactor solve_lower(const HodlrTriangular& l, const LowRankFactor& b, const Arith& arith, std::size_t node = 0);

/// Solve X U = B with U HODLR upper triangular.
Eigen::MatrixXd solve_upper_right(const Eigen::MatrixXd& b, const HodlrTriangular& u, const Arith& arith,
                                  std::size_t node = 0);
LowRankFactor solve_upper_right(const LowRankFactor& b, const HodlrTriangular& u, const Arith& arith,
                                std::size_t node = 0);

/// In place: the subtree of h rooted at `node` becomes H22 - L21 U12,
/// off-diagonal blocks recompressed to relative tolerance eps.
void schur_update(HodlrMatrix& h, std::size_t node, const LowRankFactor& l21, const LowRankFactor& u12, double eps,
                  const Arith& arith);

/// Product of two factors with the small middle product evaluated in the
/// working arithmetic.
LowRankFactor factor_product(const LowRankFactor& a, const LowRankFactor& b, const Arith& arith);

Eigen::MatrixXd reconstruct_triangular(const HodlrTriangular& t);
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> reconstruct_lu(const HodlrLuFactors& f);

/// Identity as a HODLR triangular of the given kind.
HodlrTriangular identity_triangular(const ClusterTree& tree, Triangle kind);

}  // namespace hodlrmp
