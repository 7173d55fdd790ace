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

namespace hodlrmp {

/// Points in 1D or 2D, one point per row.
struct PointSet {
  int dim = 1;
  Eigen::MatrixXd coords;  // count x dim

  std::size_t size() const { return static_cast<std::size_t>(coords.rows()); }
};

/// n equispaced points on [0, 1], endpoints included.
PointSet grid_1d(std::size_t n);
/// First n points (row-major) of the m x m grid on [-1, 1]^2, m = ceil(sqrt(n)).
PointSet grid_2d(std::size_t n);

enum class KernelKind {
  inverse_distance,  // 1/(x - y), 1 on the diagonal; 1D only
  log_distance,      // log ||x - y||, 0 for coincident points
  gaussian           // exp(-||x - y||^2 / (2 h^2))
};

struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double h = 1.0;
};

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const PointSet& pts);

/// The four n = 2000 kernel test matrices by number 1..4.
Eigen::MatrixXd test_kernel_matrix(int which, std::size_t n = 2000);

/// SplitMix64 counter-based generator: output i is mix(seed + (i+1) * golden).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform on the open interval (-1, 1).
  double uniform_pm1();

 private:
  std::uint64_t state_;
};

Eigen::VectorXd random_vector(std::size_t n, SplitMix64& rng);
/// Entries uniform on (-1, 1), column-major fill order.
Eigen::MatrixXd random_matrix(std::size_t n, std::uint64_t seed);
/// random_matrix plus n on the diagonal.
Eigen::MatrixXd diagonally_dominant_matrix(std::size_t n, std::uint64_t seed);

/// Reads MatrixMarket coordinate or array files with a real/integer field,
/// general or symmetric symmetry. The result must be square.
Eigen::MatrixXd read_matrix_market(const std::string& path);
Eigen::MatrixXd read_matrix_market(std::istream& in, const std::string& source_name = "<stream>");
/// Number of stored entries the file declares (coordinate: nnz line; array: count).
std::size_t matrix_market_stored_entries(const std::string& path);

/// Coordinate general format, every nonzero written with 17 significant digits.
void write_matrix_market(const Eigen::MatrixXd& a, std::ostream& out);
void write_matrix_market(const Eigen::MatrixXd& a, const std::string& path);

/// S = A22 - A21 A11^{-1} A12 with A11 the leading ceil(n/2) block.
Eigen::MatrixXd schur_complement_11(const Eigen::MatrixXd& a);

}  // namespace hodlrmp
