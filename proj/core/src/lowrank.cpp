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
#include "hodlrmp/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// LAPACK (Fortran interface, gfortran hidden string lengths)
extern "C" {
void dgesdd_(const char* jobz, const int* m, const int* n, double* a, const int* lda, double* s, double* u,
             const int* ldu, double* vt, const int* ldvt, double* work, const int* lwork, int* iwork, int* info,
             std::size_t jobz_len);
void dgesvd_(const char* jobu, const char* jobvt, const int* m, const int* n, double* a, const int* lda, double* s,
             double* u, const int* ldu, double* vt, const int* ldvt, double* work, const int* lwork, int* info,
             std::size_t jobu_len, std::size_t jobvt_len);
}

namespace hodlrmp {

namespace {

constexpr double kU64 = 0x1p-53;

std::string shape(Eigen::Index r, Eigen::Index c) { return std::to_string(r) + "x" + std::to_string(c); }

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("truncation tolerance must lie in [0, 1)");
}

// Thin SVD a = u diag(s) vt. Divide and conquer first; QR iteration if it
// fails to converge.
bool lapack_svd(Eigen::MatrixXd a, Eigen::MatrixXd& u, Eigen::VectorXd& s, Eigen::MatrixXd& vt) {
  const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols()), k = std::min(m, n);
  const Eigen::MatrixXd copy = a;
  u.resize(m, k);
  s.resize(k);
  vt.resize(k, n);
  int info = 0, lwork = -1;
  double query = 0.0;
  std::vector<int> iwork(8 * static_cast<std::size_t>(k));
  dgesdd_("S", &m, &n, a.data(), &m, s.data(), u.data(), &m, vt.data(), &k, &query, &lwork, iwork.data(), &info, 1);
  lwork = static_cast<int>(query);
  std::vector<double> work(static_cast<std::size_t>(std::max(lwork, 1)));
  dgesdd_("S", &m, &n, a.data(), &m, s.data(), u.data(), &m, vt.data(), &k, work.data(), &lwork, iwork.data(),
          &info, 1);
  if (info == 0) return true;

  a = copy;
  lwork = -1;
  dgesvd_("S", "S", &m, &n, a.data(), &m, s.data(), u.data(), &m, vt.data(), &k, &query, &lwork, &info, 1, 1);
  lwork = static_cast<int>(query);
  work.assign(static_cast<std::size_t>(std::max(lwork, 1)), 0.0);
  dgesvd_("S", "S", &m, &n, a.data(), &m, s.data(), u.data(), &m, vt.data(), &k, work.data(), &lwork, &info, 1, 1);
  return info == 0;
}

}  // namespace

double frobenius_norm(const LowRankFactor& f) {
  if (f.rank() == 0) return 0.0;
  // ||U V^T||_F^2 = trace((U^T U)(V^T V))
  const Eigen::MatrixXd gu = f.U.transpose() * f.U;
  const Eigen::MatrixXd gv = f.V.transpose() * f.V;
  return std::sqrt(std::max(0.0, gu.cwiseProduct(gv).sum()));
}

LowRankFactor::LowRankFactor(Eigen::MatrixXd u, Eigen::MatrixXd v, PrecisionFormat fmt)
    : U(std::move(u)), V(std::move(v)), format(std::move(fmt)) {
  if (U.cols() != V.cols())
    throw std::invalid_argument("factor rank mismatch: U is " + shape(U.rows(), U.cols()) + ", V is " +
                                shape(V.rows(), V.cols()));
}

LowRankFactor LowRankFactor::zero(Eigen::Index rows, Eigen::Index cols, PrecisionFormat fmt) {
  return LowRankFactor(Eigen::MatrixXd(rows, 0), Eigen::MatrixXd(cols, 0), std::move(fmt));
}

Eigen::MatrixXd LowRankFactor::dense() const {
  if (rank() == 0) return Eigen::MatrixXd::Zero(rows(), cols());
  return U * V.transpose();
}

LowRankFactor LowRankFactor::negated() const { return LowRankFactor(-U, V, format); }

LowRankFactor LowRankFactor::block(Eigen::Index row0, Eigen::Index nrows, Eigen::Index col0,
                                   Eigen::Index ncols) const {
  return LowRankFactor(U.middleRows(row0, nrows), V.middleRows(col0, ncols), format);
}

Eigen::Index truncation_rank(const Eigen::VectorXd& s, double eps, Eigen::Index n) {
  const Eigen::Index full = s.size();
  if (full == 0 || s(0) == 0.0) return 0;
  if (eps == 0.0) {
    const double floor = static_cast<double>(std::max<Eigen::Index>(n, 1)) * kU64 * s(0);
    Eigen::Index r = 0;
    while (r < full && s(r) > floor) ++r;
    return r;
  }
  const double limit = eps * eps * s.squaredNorm();
  // tail[r] = sum_{i >= r} s_i^2, accumulated from the small end
  double tail = 0.0;
  Eigen::Index r = full;
  while (r > 0) {
    const double next = tail + s(r - 1) * s(r - 1);
    if (next > limit) break;
    tail = next;
    --r;
  }
  return r;
}

BlockSvd compute_block_svd(const Eigen::MatrixXd& block) {
  if (!block.allFinite()) throw std::invalid_argument("block contains non-finite entries");
  BlockSvd out;
  out.rows = block.rows();
  out.cols = block.cols();
  out.frobenius = block.norm();
  if (block.size() == 0 || out.frobenius == 0.0) {
    out.U.resize(block.rows(), 0);
    out.V.resize(block.cols(), 0);
    out.S.resize(0);
    return out;
  }
  Eigen::MatrixXd vt;
  if (!lapack_svd(block, out.U, out.S, vt)) throw std::runtime_error("SVD failed to converge");
  out.V = vt.transpose();
  return out;
}

LowRankFactor BlockSvd::truncate(double eps) const {
  check_eps(eps);
  const Eigen::Index r = truncation_rank(S, eps, std::max(rows, cols));
  return LowRankFactor(U.leftCols(r), V.leftCols(r) * S.head(r).asDiagonal());
}

LowRankFactor truncate_block(const Eigen::MatrixXd& block, double eps) {
  check_eps(eps);
  return compute_block_svd(block).truncate(eps);
}

LowRankFactor store_factor(const LowRankFactor& f, const PrecisionFormat& fmt) {
  return LowRankFactor(round_matrix(f.U, fmt), round_matrix(f.V, fmt), fmt);
}

LowRankFactor recompress_sum(const LowRankFactor& a, const LowRankFactor& b, double eps) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("recompress_sum shape mismatch: " + shape(a.rows(), a.cols()) + " vs " +
                                shape(b.rows(), b.cols()));
  check_eps(eps);
  const Eigen::Index m = a.rows(), n = a.cols();
  const Eigen::Index k = a.rank() + b.rank();
  if (k == 0 || m == 0 || n == 0) return LowRankFactor::zero(m, n);

  Eigen::MatrixXd us(m, k), vs(n, k);
  us << a.U, b.U;
  vs << a.V, b.V;

  // thin QR of both stacked bases; sum = Qu (Ru Rv^T) Qv^T
  Eigen::HouseholderQR<Eigen::MatrixXd> qru(us), qrv(vs);
  const Eigen::Index ku = std::min(m, k), kv = std::min(n, k);
  Eigen::MatrixXd qu = qru.householderQ() * Eigen::MatrixXd::Identity(m, ku);
  Eigen::MatrixXd qv = qrv.householderQ() * Eigen::MatrixXd::Identity(n, kv);
  Eigen::MatrixXd ru = qru.matrixQR().topRows(ku).triangularView<Eigen::Upper>();
  Eigen::MatrixXd rv = qrv.matrixQR().topRows(kv).triangularView<Eigen::Upper>();
  Eigen::MatrixXd core = ru * rv.transpose();

  if (core.norm() == 0.0) return LowRankFactor::zero(m, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index r = truncation_rank(s, eps, std::max(m, n));
  // cancellation below the accuracy of the inputs is noise, not rank; the
  // factor 8 covers the entrywise error of SVD-built or product-built terms
  const double noise =
      8.0 * static_cast<double>(std::max({m, n, k})) * kU64 * (frobenius_norm(a) + frobenius_norm(b));
  while (r > 0 && s(r - 1) <= noise) --r;
  return LowRankFactor(qu * svd.matrixU().leftCols(r),
                       qv * (svd.matrixV().leftCols(r) * s.head(r).asDiagonal()));
}

LowRankFactor recompress(const LowRankFactor& a, double eps) {
  return recompress_sum(a, LowRankFactor::zero(a.rows(), a.cols()), eps);
}

LowRankFactor factor_product(const LowRankFactor& a, const LowRankFactor& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("factor_product shape mismatch: " + shape(a.rows(), a.cols()) + " * " +
                                shape(b.rows(), b.cols()));
  if (a.rank() == 0 || b.rank() == 0) return LowRankFactor::zero(a.rows(), b.cols());
  const Eigen::MatrixXd middle = a.V.transpose() * b.U;  // ra x rb
  if (a.rank() <= b.rank()) return LowRankFactor(a.U, b.V * middle.transpose());
  return LowRankFactor(a.U * middle, b.V);
}

}  // namespace hodlrmp
