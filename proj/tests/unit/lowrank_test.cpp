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

#include "hodlrmp/lowrank.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace hodlrmp;

namespace {
constexpr double kU64 = 0x1p-53;

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }
}  // namespace

TEST_CASE("truncation of simple blocks") {
  CHECK(truncate_block(Eigen::MatrixXd::Zero(5, 3), 1e-3).rank() == 0);

  Eigen::VectorXd u(4), v(3);
  u << 1, 2, 3, 4;
  v << -1, 0.5, 2;
  const Eigen::MatrixXd outer = u * v.transpose();
  const auto f = truncate_block(outer, 1e-8);
  CHECK(f.rank() == 1);
  CHECK(rel(f.dense(), outer) <= 10 * kU64);

  const Eigen::MatrixXd d = Eigen::Vector3d(1.0, 0.5, 1e-3).asDiagonal();
  CHECK(truncate_block(d, 1e-2).rank() == 2);
  CHECK(truncate_block(d, 1e-4).rank() == 3);
  CHECK(oracle::gram_truncation_rank(d, 1e-2) == 2);

  CHECK_THROWS(truncate_block(d, 1.0));
  CHECK_THROWS(truncate_block(d, -1e-3));
  Eigen::MatrixXd bad = d;
  bad(0, 1) = std::nan("");
  CHECK_THROWS(truncate_block(bad, 1e-3));
}

TEST_CASE("truncation meets its tolerance with minimal rank") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = gen::uniform_int(1, 24, rng), n = gen::uniform_int(1, 24, rng);
    // graded spectrum so truncation is exercised at every tolerance
    Eigen::MatrixXd b = gen::dense(m, n, rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s(svd.singularValues().size());
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::pow(10.0, -0.7 * static_cast<double>(i));
    b = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
    const double eps = std::pow(10.0, -gen::uniform_int(1, 10, rng));
    CAPTURE(m);
    CAPTURE(n);
    CAPTURE(eps);

    const auto f = truncate_block(b, eps);
    CHECK((b - f.dense()).norm() <= eps * b.norm() * (1 + 1e-10) + 100 * kU64 * b.norm());
    // the spectrum is known by construction
    Eigen::Index r = s.size();
    double tail = 0.0;
    while (r > 0 && tail + s(r - 1) * s(r - 1) <= eps * eps * s.squaredNorm()) {
      tail += s(r - 1) * s(r - 1);
      --r;
    }
    CHECK(f.rank() == r);
    if (eps >= 1e-6) CHECK(oracle::gram_truncation_rank(b, eps) == r);
    if (f.rank() > 0) {
      const Eigen::MatrixXd g = f.U.transpose() * f.U;
      CHECK((g - Eigen::MatrixXd::Identity(f.rank(), f.rank())).cwiseAbs().maxCoeff() <=
            100.0 * static_cast<double>(f.rank()) * kU64);
    }
  }
}

TEST_CASE("truncation_rank at eps zero keeps values above the noise floor") {
  Eigen::VectorXd s(4);
  s << 1.0, 1e-3, 1e-15, 1e-17;
  CHECK(truncation_rank(s, 0.0, 10) == 2);
  CHECK(truncation_rank(s, 0.0, 1) == 3);
  CHECK(truncation_rank(Eigen::VectorXd::Zero(3), 0.1, 3) == 0);
}

TEST_CASE("store_factor") {
  CHECK(store_factor(LowRankFactor::zero(4, 3), formats::bf16()).rank() == 0);
  Eigen::MatrixXd u(2, 1), v(3, 1);
  u << 0, 1;
  v << 1, 0, 1;
  const auto s = store_factor(LowRankFactor(u, v), formats::fp16());
  CHECK(s.U == u);
  CHECK(s.V == v);
  CHECK(s.format == formats::fp16());

  SplitMix64 rng(5);
  const auto f = gen::factor(10, 8, 3, rng);
  const auto r = store_factor(f, formats::bf16());
  for (Eigen::Index i = 0; i < f.U.size(); ++i) {
    CHECK(std::abs(r.U(i) - f.U(i)) <= 0x1p-8 * std::abs(f.U(i)));
    CHECK(r.U(i) == round_scalar(f.U(i), formats::bf16()));
  }
  for (Eigen::Index i = 0; i < f.V.size(); ++i) CHECK(std::abs(r.V(i) - f.V(i)) <= 0x1p-8 * std::abs(f.V(i)));
}

TEST_CASE("recompress_sum") {
  SplitMix64 rng(17);
  const auto f = gen::factor(12, 9, 3, rng);
  CHECK(recompress_sum(f, f.negated(), 1e-12).rank() == 0);

  Eigen::VectorXd x = gen::dense(6, 1, rng), y = gen::dense(5, 1, rng), z = gen::dense(5, 1, rng);
  const LowRankFactor a(x, y), b(2.0 * x, z);
  CHECK(recompress_sum(a, b, 1e-12).rank() <= 1);

  const auto p = gen::factor(20, 15, 2, rng), q = gen::factor(20, 15, 3, rng);
  const auto s = recompress_sum(p, q, 1e-14);
  const Eigen::MatrixXd dense_sum = p.dense() + q.dense();
  CHECK(s.rank() <= 5);
  CHECK(s.rank() == 5);
  CHECK(rel(s.dense(), dense_sum) <= 1e-12);

  CHECK(recompress(LowRankFactor::zero(4, 4), 1e-3).rank() == 0);
  CHECK_THROWS(recompress_sum(gen::factor(3, 3, 1, rng), gen::factor(4, 3, 1, rng), 1e-3));
}

TEST_CASE("recompress_sum property: tolerance and orthonormal basis") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = gen::uniform_int(1, 30, rng), n = gen::uniform_int(1, 30, rng);
    const auto a = gen::factor(m, n, gen::uniform_int(0, 4, rng), rng);
    const auto b = gen::factor(m, n, gen::uniform_int(0, 4, rng), rng);
    const double eps = std::pow(10.0, -gen::uniform_int(1, 12, rng));
    const auto s = recompress_sum(a, b, eps);
    const Eigen::MatrixXd exact = a.dense() + b.dense();
    CHECK(s.rank() <= a.rank() + b.rank());
    CHECK((s.dense() - exact).norm() <= eps * exact.norm() * (1 + 1e-8) + 1e-13 * (a.dense().norm() + b.dense().norm()));
  }
}

TEST_CASE("factor_product") {
  SplitMix64 rng(31);
  const auto z = factor_product(LowRankFactor::zero(3, 4), gen::factor(4, 5, 2, rng));
  CHECK(z.rank() == 0);
  CHECK(z.rows() == 3);
  CHECK(z.cols() == 5);

  const Eigen::MatrixXd e1 = Eigen::VectorXd::Unit(3, 0);
  const LowRankFactor e(e1, e1);
  CHECK(factor_product(e, e).dense() == e1 * e1.transpose());

  const auto a = gen::factor(7, 6, 2, rng), b = gen::factor(6, 8, 3, rng);
  const auto p = factor_product(a, b);
  CHECK(p.rank() == 2);
  CHECK(rel(p.dense(), a.dense() * b.dense()) <= 1e-14);
  CHECK_THROWS(factor_product(a, a));
}

TEST_CASE("frobenius_norm of a factor") {
  SplitMix64 rng(3);
  const auto f = gen::factor(9, 7, 4, rng);
  CHECK(frobenius_norm(f) == doctest::Approx(f.dense().norm()).epsilon(1e-13));
  CHECK(frobenius_norm(LowRankFactor::zero(2, 2)) == 0.0);
  CHECK(f.block(2, 3, 1, 4).dense() == f.dense().block(2, 1, 3, 4));
}

TEST_CASE("block SVD is backward stable on a strongly graded kernel block") {
  // adjacent clusters of the inverse-distance kernel: singular values span 16 decades
  const Eigen::MatrixXd k = kernel_matrix({KernelKind::inverse_distance, 1.0}, grid_1d(2000));
  const Eigen::MatrixXd b = k.block(0, 16, 16, 16);
  const BlockSvd svd = compute_block_svd(b);
  const Eigen::MatrixXd r = svd.U * svd.S.asDiagonal() * svd.V.transpose();
  CHECK((r - b).norm() <= 100 * kU64 * b.norm());
  const auto f = svd.truncate(1e-10);
  CHECK((f.dense() - b).norm() <= 1e-10 * b.norm());
}
