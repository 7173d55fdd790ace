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
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hodlrmp::cli {

/// Parsed --source descriptor.
///
///   kernel:<i|ii|iii>:<n>[:h=<bandwidth>]
///   mat-1 .. mat-4                 (the n = 2000 kernel matrices)
///   mtx:<path>[:schur]             (path tried as given, then under $HODLR_MP_DATA)
///   random:<n>:<seed>
///   randdd:<n>:<seed>              (random plus n on the diagonal)
///   identity:<n>
struct MatrixSource {
  enum class Kind { kernel, test_kernel, mtx, random, random_dd, identity };

  Kind kind = Kind::identity;
  std::string text;  // the descriptor as given, used as the matrix id
  int kernel = 1;    // 1..3 for kernel:, 1..4 for mat-
  double h = 1.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string path;
  bool schur = false;
};

/// Throws std::invalid_argument with a message naming the bad part.
MatrixSource parse_source(const std::string& text);

/// Resolves mtx paths against HODLR_MP_DATA; throws std::runtime_error if
/// the file cannot be found.
std::string resolve_fixture(const std::string& path);

/// Dense matrix for a source.
Eigen::MatrixXd load_source(const MatrixSource& src);

}  // namespace hodlrmp::cli
