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
#include "hodlrmp/linops.hpp"

#include <cmath>
#include <sstream>

namespace hodlrmp {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using ConstRef = Eigen::Ref<const MatrixXd>;
using MutRef = Eigen::Ref<MatrixXd>;

constexpr double kU64 = 0x1p-53;

Index as_index(std::size_t v) { return static_cast<Index>(v); }

// C = A^T B. In full-arithmetic mode every product and partial sum is
// rounded, accumulating k in increasing order.
MatrixXd gemm_tn(const Arith& arith, ConstRef a, ConstRef b) {
  if (!arith.rounds()) return a.transpose() * b;
  MatrixXd c(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index i = 0; i < a.cols(); ++i) {
      double s = 0.0;
      for (Index k = 0; k < a.rows(); ++k) s = arith.mul_add(s, a(k, i), b(k, j));
      c(i, j) = s;
    }
  }
  return c;
}

MatrixXd gemm(const Arith& arith, ConstRef a, ConstRef b) {
  if (!arith.rounds()) return a * b;
  const MatrixXd at = a.transpose();
  return gemm_tn(arith, at, b);
}

void subtract_in_place(const Arith& arith, MutRef x, ConstRef y) {
  if (!arith.rounds()) {
    x -= y;
    return;
  }
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) x(i, j) = arith.sub(x(i, j), y(i, j));
}

LowRankFactor load_factor(const Arith& arith, const LowRankFactor& f) {
  return LowRankFactor(arith.load(f.U), arith.load(f.V), arith.format());
}

LowRankFactor store_result(const Arith& arith, MatrixXd u, MatrixXd v) {
  arith.store(u);
  arith.store(v);
  return LowRankFactor(std::move(u), std::move(v), arith.format());
}

void check_node(const ClusterTree& tree, std::size_t node) {
  if (node >= tree.node_count()) throw std::out_of_range("node id " + std::to_string(node) + " outside tree");
}

// Solve L X = B in place, L unit lower HODLR on subtree `id`.
void lower_solve_in_place(const HodlrTriangular& l, std::size_t id, MutRef x, const Arith& arith) {
  if (l.tree.is_leaf(id)) {
    const MatrixXd& d = l.leaves[ClusterTree::index_of(id)];
    for (Index j = 0; j < x.cols(); ++j)
      for (Index i = 0; i < x.rows(); ++i) {
        double s = x(i, j);
        for (Index k = 0; k < i; ++k) s = arith.sub(s, arith.mul(d(i, k), x(k, j)));
        x(i, j) = s;
      }
    return;
  }
  const std::size_t c0 = ClusterTree::left_child(id), c1 = ClusterTree::right_child(id);
  const Index n0 = as_index(l.tree.node_range(c0).size());
  const Index n1 = as_index(l.tree.node_range(c1).size());
  lower_solve_in_place(l, c0, x.topRows(n0), arith);
  const LowRankFactor& l21 = l.offdiag[id];
  if (l21.rank() > 0) {
    const MatrixXd t = gemm_tn(arith, l21.V, x.topRows(n0));
    subtract_in_place(arith, x.bottomRows(n1), gemm(arith, l21.U, t));
  }
  lower_solve_in_place(l, c1, x.bottomRows(n1), arith);
}

// Solve U^T X = B in place, U upper HODLR on subtree `id`.
void upper_transposed_solve_in_place(const HodlrTriangular& u, std::size_t id, MutRef x, const Arith& arith) {
  if (u.tree.is_leaf(id)) {
    const std::size_t leaf = ClusterTree::index_of(id);
    const MatrixXd& d = u.leaves[leaf];
    for (Index i = 0; i < d.rows(); ++i)
      if (d(i, i) == 0.0)
        throw std::domain_error("singular diagonal in upper triangular leaf " + std::to_string(leaf));
    for (Index j = 0; j < x.cols(); ++j)
      for (Index i = 0; i < x.rows(); ++i) {
        double s = x(i, j);
        for (Index k = 0; k < i; ++k) s = arith.sub(s, arith.mul(d(k, i), x(k, j)));
        x(i, j) = arith.div(s, d(i, i));
      }
    return;
  }
  const std::size_t c0 = ClusterTree::left_child(id), c1 = ClusterTree::right_child(id);
  const Index n0 = as_index(u.tree.node_range(c0).size());
  const Index n1 = as_index(u.tree.node_range(c1).size());
  upper_transposed_solve_in_place(u, c0, x.topRows(n0), arith);
  const LowRankFactor& u12 = u.offdiag[id];
  if (u12.rank() > 0) {
    // U12^T X1 = V (U^T X1)
    const MatrixXd t = gemm_tn(arith, u12.U, x.topRows(n0));
    subtract_in_place(arith, x.bottomRows(n1), gemm(arith, u12.V, t));
  }
  upper_transposed_solve_in_place(u, c1, x.bottomRows(n1), arith);
}

void subtract_lowrank(HodlrMatrix& h, std::size_t id, const LowRankFactor& z, double eps, const Arith& arith) {
  if (h.tree.is_leaf(id)) {
    MatrixXd& d = h.leaves[ClusterTree::index_of(id)];
    const MatrixXd vt = z.V.transpose();
    subtract_in_place(arith, d, gemm(arith, z.U, vt));
    arith.store(d);
    return;
  }
  const std::size_t c0 = ClusterTree::left_child(id), c1 = ClusterTree::right_child(id);
  const Index n0 = as_index(h.tree.node_range(c0).size());
  const Index n1 = as_index(h.tree.node_range(c1).size());

  // recompression runs in binary64; its result is stored in the working format
  auto update = [&](LowRankFactor& block, const LowRankFactor& part) {
    LowRankFactor sum = recompress_sum(block, part.negated(), eps);
    block = store_result(arith, std::move(sum.U), std::move(sum.V));
  };
  update(h.upper[id], z.block(0, n0, n0, n1));
  update(h.lower[id], z.block(n0, n1, 0, n0));
  subtract_lowrank(h, c0, z.block(0, n0, 0, n0), eps, arith);
  subtract_lowrank(h, c1, z.block(n0, n1, n0, n1), eps, arith);
}

void dense_lu_in_place(MatrixXd& d, std::size_t leaf, const Arith& arith, double pivot_tol) {
  const Index m = d.rows();
  const double tol = pivot_tol >= 0.0 ? pivot_tol : static_cast<double>(m) * kU64 * d.norm();
  for (Index k = 0; k < m; ++k) {
    const double p = d(k, k);
    if (!(std::fabs(p) > tol)) throw PivotBreakdown(leaf, static_cast<std::size_t>(k), p, tol);
    for (Index i = k + 1; i < m; ++i) d(i, k) = arith.div(d(i, k), p);
    for (Index j = k + 1; j < m; ++j)
      for (Index i = k + 1; i < m; ++i) d(i, j) = arith.sub(d(i, j), arith.mul(d(i, k), d(k, j)));
  }
}

struct LuContext {
  HodlrMatrix& work;
  HodlrLuFactors& out;
  const Arith& arith;
  double eps;
  double pivot_tol;

  void factor(std::size_t id) {
    if (work.tree.is_leaf(id)) {
      const std::size_t leaf = ClusterTree::index_of(id);
      MatrixXd d = work.leaves[leaf];
      dense_lu_in_place(d, leaf, arith, pivot_tol);
      arith.store(d);
      MatrixXd lower = d.triangularView<Eigen::StrictlyLower>();
      lower.diagonal().setOnes();
      out.L.leaves[leaf] = std::move(lower);
      out.U.leaves[leaf] = d.triangularView<Eigen::Upper>();
      return;
    }
    const std::size_t c0 = ClusterTree::left_child(id), c1 = ClusterTree::right_child(id);
    factor(c0);
    LowRankFactor u12 = solve_lower(out.L, work.upper[id], arith, c0);
    LowRankFactor l21 = solve_upper_right(work.lower[id], out.U, arith, c0);
    schur_update(work, c1, l21, u12, eps, arith);
    out.U.offdiag[id] = std::move(u12);
    out.L.offdiag[id] = std::move(l21);
    factor(c1);
  }
};

std::string breakdown_message(std::size_t leaf, std::size_t row, double pivot, double tol) {
  std::ostringstream os;
  os << "singular pivot encountered in leaf " << leaf << " at row " << row << " (|pivot| = " << std::fabs(pivot)
     << ", guard = " << tol << ")";
  return os.str();
}

}  // namespace

PivotBreakdown::PivotBreakdown(std::size_t leaf, std::size_t row, double pivot, double tol)
    : std::runtime_error(breakdown_message(leaf, row, pivot, tol)), leaf_(leaf), row_(row) {}

Eigen::VectorXd matvec(const HodlrMatrix& h, const Eigen::VectorXd& x, const PrecisionFormat& working,
                       ArithMode mode) {
  if (static_cast<std::size_t>(x.size()) != h.n())
    throw std::invalid_argument("matvec: vector length " + std::to_string(x.size()) + " does not match dimension " +
                                std::to_string(h.n()));
  const Arith arith(working, mode);
  const MatrixXd xw = arith.load(MatrixXd(x));
  MatrixXd b = MatrixXd::Zero(xw.rows(), 1);

  for (int k = 1; k <= h.depth(); ++k) {
    for (std::size_t i = 0; i < (std::size_t{1} << (k - 1)); ++i) {
      const std::size_t id = ClusterTree::node_id(k - 1, i);
      const auto& r0 = h.tree.node_range(ClusterTree::left_child(id));
      const auto& r1 = h.tree.node_range(ClusterTree::right_child(id));
      const Index o0 = as_index(r0.begin), n0 = as_index(r0.size());
      const Index o1 = as_index(r1.begin), n1 = as_index(r1.size());

      auto apply = [&](const LowRankFactor& stored, Index out_off, Index out_n, Index in_off, Index in_n) {
        if (stored.rank() == 0) return;
        const LowRankFactor f = load_factor(arith, stored);
        const MatrixXd t = gemm_tn(arith, f.V, xw.middleRows(in_off, in_n));
        const MatrixXd y = gemm(arith, f.U, t);
        auto seg = b.middleRows(out_off, out_n);
        for (Index r = 0; r < out_n; ++r) seg(r, 0) = arith.add(seg(r, 0), y(r, 0));
      };
      apply(h.upper[id], o0, n0, o1, n1);
      apply(h.lower[id], o1, n1, o0, n0);
    }
  }
  for (std::size_t i = 0; i < h.tree.leaf_count(); ++i) {
    const auto& r = h.tree.range(h.depth(), i);
    const Index o = as_index(r.begin), m = as_index(r.size());
    const MatrixXd d = arith.load(h.leaves[i]);
    const MatrixXd dt = d.transpose();
    const MatrixXd y = gemm_tn(arith, dt, xw.middleRows(o, m));
    for (Index row = 0; row < m; ++row) b(o + row, 0) = arith.add(b(o + row, 0), y(row, 0));
  }
  arith.store(b);
  return b.col(0);
}

LowRankFactor factor_product(const LowRankFactor& a, const LowRankFactor& b, const Arith& arith) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("factor_product shape mismatch: inner dimensions " + std::to_string(a.cols()) +
                                " and " + std::to_string(b.rows()));
  if (a.rank() == 0 || b.rank() == 0) return LowRankFactor::zero(a.rows(), b.cols(), arith.format());
  const MatrixXd middle = gemm_tn(arith, a.V, b.U);  // ra x rb
  if (a.rank() <= b.rank()) {
    const MatrixXd mt = middle.transpose();
    return store_result(arith, a.U, gemm(arith, b.V, mt));
  }
  return store_result(arith, gemm(arith, a.U, middle), b.V);
}

Eigen::MatrixXd solve_lower(const HodlrTriangular& l, const Eigen::MatrixXd& b, const Arith& arith,
                            std::size_t node) {
  check_node(l.tree, node);
  if (l.kind != Triangle::lower) throw std::invalid_argument("solve_lower needs a lower triangular HODLR matrix");
  if (static_cast<std::size_t>(b.rows()) != l.tree.node_range(node).size())
    throw std::invalid_argument("solve_lower: right-hand side has " + std::to_string(b.rows()) + " rows, expected " +
                                std::to_string(l.tree.node_range(node).size()));
  MatrixXd x = b;
  lower_solve_in_place(l, node, x, arith);
  arith.store(x);
  return x;
}

LowRankFactor solve_lower(const HodlrTriangular& l, const LowRankFactor& b, const Arith& arith, std::size_t node) {
  MatrixXd w = solve_lower(l, b.U, arith, node);
  return store_result(arith, std::move(w), b.V);
}

Eigen::MatrixXd solve_upper_right(const Eigen::MatrixXd& b, const HodlrTriangular& u, const Arith& arith,
                                  std::size_t node) {
  check_node(u.tree, node);
  if (u.kind != Triangle::upper)
    throw std::invalid_argument("solve_upper_right needs an upper triangular HODLR matrix");
  if (static_cast<std::size_t>(b.cols()) != u.tree.node_range(node).size())
    throw std::invalid_argument("solve_upper_right: right-hand side has " + std::to_string(b.cols()) +
                                " columns, expected " + std::to_string(u.tree.node_range(node).size()));
  MatrixXd xt = b.transpose();
  upper_transposed_solve_in_place(u, node, xt, arith);
  arith.store(xt);
  return xt.transpose();
}

LowRankFactor solve_upper_right(const LowRankFactor& b, const HodlrTriangular& u, const Arith& arith,
                                std::size_t node) {
  // X = U_B W^T with U^T W = V_B
  MatrixXd w = solve_upper_right(MatrixXd(b.V.transpose()), u, arith, node).transpose();
  return store_result(arith, b.U, std::move(w));
}

void schur_update(HodlrMatrix& h, std::size_t node, const LowRankFactor& l21, const LowRankFactor& u12, double eps,
                  const Arith& arith) {
  check_node(h.tree, node);
  const auto n = as_index(h.tree.node_range(node).size());
  if (l21.rows() != n || u12.cols() != n)
    throw std::invalid_argument("schur_update: update is " + std::to_string(l21.rows()) + "x" +
                                std::to_string(u12.cols()) + ", block is " + std::to_string(n) + "x" +
                                std::to_string(n));
  const LowRankFactor z = factor_product(l21, u12, arith);
  if (z.rank() == 0) return;
  subtract_lowrank(h, node, z, eps, arith);
}

HodlrLuFactors lu(const HodlrMatrix& h, double eps, const PrecisionFormat& working, const LuOptions& opts) {
  validate(h);
  const Arith arith(working, opts.mode);

  HodlrMatrix work = h;
  work.working_format = working;
  for (auto& d : work.leaves) d = arith.load(d);
  for (std::size_t id = 0; id + h.tree.leaf_count() < h.tree.node_count(); ++id) {
    work.upper[id] = load_factor(arith, work.upper[id]);
    work.lower[id] = load_factor(arith, work.lower[id]);
  }

  HodlrLuFactors out;
  out.working_format = working;
  out.mode = opts.mode;
  for (auto* t : {&out.L, &out.U}) {
    t->tree = h.tree;
    t->leaves.resize(h.tree.leaf_count());
    t->offdiag.resize(h.tree.node_count());
  }
  out.L.kind = Triangle::lower;
  out.U.kind = Triangle::upper;

  LuContext ctx{work, out, arith, eps, opts.pivot_tol};
  ctx.factor(0);
  return out;
}

Eigen::MatrixXd reconstruct_triangular(const HodlrTriangular& t) {
  const Index n = as_index(t.n());
  MatrixXd out = MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < t.tree.leaf_count(); ++i) {
    const auto& r = t.tree.range(t.tree.depth(), i);
    const Index o = as_index(r.begin), m = as_index(r.size());
    if (t.kind == Triangle::lower) {
      MatrixXd d = t.leaves[i].triangularView<Eigen::StrictlyLower>();
      d.diagonal().setOnes();
      out.block(o, o, m, m) = d;
    } else {
      out.block(o, o, m, m) = t.leaves[i].triangularView<Eigen::Upper>();
    }
  }
  for (std::size_t id = 0; id + t.tree.leaf_count() < t.tree.node_count(); ++id) {
    const auto& r0 = t.tree.node_range(ClusterTree::left_child(id));
    const auto& r1 = t.tree.node_range(ClusterTree::right_child(id));
    if (t.kind == Triangle::lower)
      out.block(as_index(r1.begin), as_index(r0.begin), as_index(r1.size()), as_index(r0.size())) =
          t.offdiag[id].dense();
    else
      out.block(as_index(r0.begin), as_index(r1.begin), as_index(r0.size()), as_index(r1.size())) =
          t.offdiag[id].dense();
  }
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> reconstruct_lu(const HodlrLuFactors& f) {
  return {reconstruct_triangular(f.L), reconstruct_triangular(f.U)};
}

HodlrTriangular identity_triangular(const ClusterTree& tree, Triangle kind) {
  HodlrTriangular t;
  t.kind = kind;
  t.tree = tree;
  for (const auto& r : tree.level_blocks(tree.depth()))
    t.leaves.push_back(MatrixXd::Identity(as_index(r.size()), as_index(r.size())));
  t.offdiag.resize(tree.node_count());
  for (std::size_t id = 0; id + tree.leaf_count() < tree.node_count(); ++id) {
    const auto& r0 = tree.node_range(ClusterTree::left_child(id));
    const auto& r1 = tree.node_range(ClusterTree::right_child(id));
    t.offdiag[id] = kind == Triangle::lower ? LowRankFactor::zero(as_index(r1.size()), as_index(r0.size()))
                                            : LowRankFactor::zero(as_index(r0.size()), as_index(r1.size()));
  }
  return t;
}

}  // namespace hodlrmp
