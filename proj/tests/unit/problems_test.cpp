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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hodlrmp/problems.hpp"

using namespace hodlrmp;

namespace {
std::string data(const std::string& name) { return std::string(HODLRMP_TEST_DATA) + "/" + name; }
}  // namespace

TEST_CASE("1D grids") {
  CHECK(grid_1d(2).coords.col(0) == Eigen::Vector2d(0.0, 1.0));
  CHECK(grid_1d(3).coords.col(0) == Eigen::Vector3d(0.0, 0.5, 1.0));
  const auto g = grid_1d(2000);
  CHECK(g.coords(0, 0) == 0.0);
  CHECK(g.coords(1999, 0) == 1.0);
  CHECK(g.coords(1, 0) == doctest::Approx(1.0 / 1999));
  CHECK_THROWS(grid_1d(0));
}

TEST_CASE("2D grids") {
  const auto g4 = grid_2d(4);
  std::set<std::pair<double, double>> corners;
  for (int i = 0; i < 4; ++i) corners.insert({g4.coords(i, 0), g4.coords(i, 1)});
  CHECK(corners == std::set<std::pair<double, double>>{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}});
  const auto g1 = grid_2d(1);
  CHECK(g1.coords(0, 0) == -1.0);
  CHECK(g1.coords(0, 1) == -1.0);

  const auto g = grid_2d(2000);
  REQUIRE(g.size() == 2000);
  // enumerate the 45 x 45 grid directly
  std::size_t k = 0;
  for (int a = 0; a < 45 && k < 2000; ++a)
    for (int b = 0; b < 45 && k < 2000; ++b, ++k) {
      CHECK(g.coords(static_cast<Eigen::Index>(k), 0) == doctest::Approx(-1.0 + a / 22.0));
      CHECK(g.coords(static_cast<Eigen::Index>(k), 1) == doctest::Approx(-1.0 + b / 22.0));
    }
}

TEST_CASE("kernel entries") {
  const auto g = kernel_matrix({KernelKind::gaussian, 0.7}, grid_2d(30));
  CHECK((g.diagonal().array() == 1.0).all());
  CHECK(g.isApprox(g.transpose(), 0.0));

  PointSet two;
  two.coords.resize(2, 1);
  two.coords << 0.0, 0.5;
  Eigen::Matrix2d expect;
  expect << 1, -2, 2, 1;
  CHECK(kernel_matrix({KernelKind::inverse_distance, 1.0}, two) == expect);

  PointSet dup;
  dup.dim = 2;
  dup.coords.resize(3, 2);
  dup.coords << 0, 0, 0, 0, 1, 0;
  const auto l = kernel_matrix({KernelKind::log_distance, 1.0}, dup);
  CHECK(l(0, 1) == 0.0);
  CHECK(l(0, 0) == 0.0);
  CHECK(l(0, 2) == 0.0);  // log 1

  const auto inv = test_kernel_matrix(1, 200);
  const Eigen::MatrixXd off = inv - Eigen::MatrixXd(inv.diagonal().asDiagonal());
  CHECK((off + off.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(kernel_matrix({KernelKind::inverse_distance, 1.0}, grid_2d(4)));
  CHECK_THROWS(kernel_matrix({KernelKind::gaussian, 0.0}, grid_1d(4)));
  CHECK_THROWS(test_kernel_matrix(5, 10));
}

TEST_CASE("SplitMix64 reference outputs") {
  // published reference sequence for seed 0
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
  CHECK(rng.next() == 0x06C45D188009454Full);

  SplitMix64 u(123);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform_pm1();
    CHECK(v > -1.0);
    CHECK(v < 1.0);
  }
  CHECK(random_matrix(5, 9) == random_matrix(5, 9));
  CHECK(random_matrix(5, 9) != random_matrix(5, 10));
  const Eigen::MatrixXd d = diagonally_dominant_matrix(30, 4);
  CHECK(d - random_matrix(30, 4) == 30.0 * Eigen::MatrixXd::Identity(30, 30));
}

TEST_CASE("MatrixMarket reader") {
  CHECK(read_matrix_market(data("diag2.mtx")) == Eigen::Vector2d(1.0, 2.0).asDiagonal().toDenseMatrix());
  const auto s = read_matrix_market(data("sym3.mtx"));
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
  CHECK(s(2, 2) == -1.5);
  CHECK(matrix_market_stored_entries(data("sym3.mtx")) == 4);
  Eigen::Matrix2d arr;
  arr << 1, 3, 2, 4;
  CHECK(read_matrix_market(data("array2.mtx")) == arr);
  CHECK(matrix_market_stored_entries(data("array2.mtx")) == 4);

  CHECK_THROWS(read_matrix_market(data("rect.mtx")));
  CHECK_THROWS(read_matrix_market(data("complex.mtx")));
  CHECK_THROWS(read_matrix_market(data("missing.mtx")));
  try {
    (void)read_matrix_market(data("bad_entry.mtx"));
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("bad_entry.mtx:4") != std::string::npos);
  }
  std::istringstream junk("not a header\n");
  CHECK_THROWS(read_matrix_market(junk));
}

TEST_CASE("MatrixMarket round trip is exact") {
  Eigen::MatrixXd a = random_matrix(7, 3);
  a(2, 5) = 0.0;
  a(1, 1) = 1e-300;
  std::stringstream buf;
  write_matrix_market(a, buf);
  CHECK(read_matrix_market(buf) == a);
}

TEST_CASE("Schur complement of the leading block") {
  Eigen::Matrix2d a;
  a << 2, 1, 1, 1;
  CHECK(schur_complement_11(a)(0, 0) == doctest::Approx(0.5));

  Eigen::MatrixXd bd = Eigen::MatrixXd::Zero(6, 6);
  bd.topLeftCorner(3, 3) = diagonally_dominant_matrix(3, 1);
  bd.bottomRightCorner(3, 3) = random_matrix(3, 2);
  CHECK(schur_complement_11(bd) == bd.bottomRightCorner(3, 3));

  CHECK(schur_complement_11(diagonally_dominant_matrix(1001, 3)).rows() == 500);
  Eigen::MatrixXd sing = Eigen::MatrixXd::Ones(4, 4);
  CHECK_THROWS(schur_complement_11(sing));
}
