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
// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   hodlrmp_acceptance [criterion ...]
//
// With no arguments every criterion runs. Exit status is 0 when all
// selected criteria pass, 77 when the only non-passing ones were skipped
// for missing fixtures, and 1 otherwise.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hodlrmp/fpsim.hpp"
#include "hodlrmp/hodlr.hpp"
#include "hodlrmp/linops.hpp"
#include "hodlrmp/metrics.hpp"
#include "hodlrmp/problems.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace hodlrmp;

namespace {

constexpr double kU64 = 0x1p-53;

enum class Status { pass, fail, skip };

struct Result {
  Status status = Status::pass;
  std::string detail;
};

Result pass(std::string d) { return {Status::pass, std::move(d)}; }
Result fail(std::string d) { return {Status::fail, std::move(d)}; }
Result skip(std::string d) { return {Status::skip, std::move(d)}; }

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::vector<double> decade_grid() {
  std::vector<double> g;
  for (int e = -1; e >= -10; --e) g.push_back(std::pow(10.0, e));
  return g;
}

struct Named {
  std::string name;
  Eigen::MatrixXd a;
};

// The four n = 2000 kernel matrices.
std::vector<Named> kernel_suite() {
  std::vector<Named> out;
  for (int k = 1; k <= 4; ++k) out.push_back({"mat-" + std::to_string(k), test_kernel_matrix(k)});
  return out;
}

std::vector<Named> construction_suite() {
  auto out = kernel_suite();
  out.push_back({"random:256:1", random_matrix(256, 1)});
  out.push_back({"random:1024:2", random_matrix(1024, 2)});
  return out;
}

std::vector<std::string> data_dirs() {
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("HODLR_MP_DATA")) dirs.emplace_back(env);
  dirs.emplace_back(HODLRMP_TEST_DATA);
  return dirs;
}

// Path of <name>.mtx in a fixture directory, or empty.
std::string find_fixture(const std::string& name) {
  for (const auto& d : data_dirs()) {
    const auto p = std::filesystem::path(d) / (name + ".mtx");
    if (std::filesystem::exists(p)) return p.string();
  }
  return {};
}

std::vector<PrecisionFormat> fp64_levels(int depth) {
  return std::vector<PrecisionFormat>(static_cast<std::size_t>(depth), formats::fp64());
}

Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }

// 1. Rounding oracle.
Result rounding_oracle() {
  std::size_t checked = 0;
  for (std::uint32_t b = 0; b < 0x10000; ++b) {
    const double h = oracle::decode_fp16(static_cast<std::uint16_t>(b));
    const double g = oracle::decode_bf16(static_cast<std::uint16_t>(b));
    if (!std::isnan(h) && round_scalar(h, formats::fp16()) != h) return fail("fp16 pattern not fixed: " + sci(h));
    if (!std::isnan(g) && round_scalar(g, formats::bf16()) != g) return fail("bf16 pattern not fixed: " + sci(g));
  }
  struct Case {
    PrecisionFormat fmt;
    oracle::ValueTable table;
  };
  const std::vector<Case> cases = {{formats::fp16(), oracle::positive_table(oracle::decode_fp16)},
                                   {formats::bf16(), oracle::positive_table(oracle::decode_bf16)}};
  SplitMix64 rng(20240601);
  for (const auto& c : cases) {
    // random significands over exponents spanning underflow to overflow
    const int lo = c.fmt.e_min - c.fmt.t - 2, hi = c.fmt.e_max + 2;
    for (int i = 0; i < 1000000; ++i) {
      const double m = 1.0 + static_cast<double>(rng.next() >> 11) * 0x1p-53;
      const int e = lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
      const double x = (rng.next() & 1u ? -1.0 : 1.0) * std::ldexp(m, e);
      if (round_scalar(x, c.fmt) != oracle::nearest(x, c.table))
        return fail(c.fmt.name + " mismatch at x = " + sci(x));
      ++checked;
    }
    // every exact midpoint, where ties-to-even decides
    const auto& v = c.table.values;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double mid = 0.5 * (v[i] + v[i + 1]);
      if (round_scalar(mid, c.fmt) != oracle::nearest(mid, c.table))
        return fail(c.fmt.name + " tie mismatch at x = " + sci(mid));
      ++checked;
    }
  }
  return pass("2^16 fixed points per format, " + std::to_string(checked) + " inputs match nearest-value search");
}

// 2 and 3 share the construction suite.
Result construction_bound_suite() {
  std::size_t cells = 0, uncertified = 0;
  double worst_ratio = 0.0;
  for (const auto& m : construction_suite()) {
    for (int depth : {2, 5, 8}) {
      const CompressionCache cache(m.a, build_tree(static_cast<std::size_t>(m.a.rows()), depth));
      for (double eps : decade_grid()) {
        const auto h = build_adaptive(cache, eps, formats::fp64(), formats::all_named());
        if (!h.plan.certified()) {
          ++uncertified;
          continue;
        }
        const double err = construction_error(m.a, h);
        const double bound = construction_bound(depth, eps);
        worst_ratio = std::max(worst_ratio, err / bound);
        ++cells;
        if (err > bound)
          return fail(m.name + " depth " + std::to_string(depth) + " eps " + sci(eps) + ": error " + sci(err) +
                      " > bound " + sci(bound));
      }
    }
  }
  return pass(std::to_string(cells) + " certified cells within bound (max error/bound " + sci(worst_ratio) + "), " +
              std::to_string(uncertified) + " fallback cells excluded");
}

Result diagonal_block_suite() {
  std::size_t blocks = 0;
  double worst_ratio = 0.0;
  for (const auto& m : construction_suite()) {
    for (int depth : {2, 5, 8}) {
      const auto tree = build_tree(static_cast<std::size_t>(m.a.rows()), depth);
      const CompressionCache cache(m.a, tree);
      for (double eps : decade_grid()) {
        const Eigen::MatrixXd r = reconstruct_dense(build_uniform(cache, eps, fp64_levels(depth), formats::fp64()));
        for (std::size_t id = 0; id < tree.node_count(); ++id) {
          const auto& rg = tree.node_range(id);
          const auto b = ix(rg.begin), s = ix(rg.size());
          const double norm = m.a.block(b, b, s, s).norm();
          const double err = (m.a.block(b, b, s, s) - r.block(b, b, s, s)).norm();
          // binary64 reconstruction noise on top of the truncation tolerance
          const double tol = eps * norm * (1.0 + 1e-12) + static_cast<double>(s) * kU64 * norm;
          if (norm > 0.0) worst_ratio = std::max(worst_ratio, err / (eps * norm));
          ++blocks;
          if (err > tol)
            return fail(m.name + " depth " + std::to_string(depth) + " eps " + sci(eps) + " node " +
                        std::to_string(id) + ": " + sci(err) + " > " + sci(tol));
        }
      }
    }
  }
  return pass(std::to_string(blocks) + " diagonal blocks within eps*||block||_F (max ratio " + sci(worst_ratio) + ")");
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

// 4. Per-level precision choices on two SuiteSparse matrices.
Result precision_choices() {
  struct Expect {
    std::string name;
    std::vector<std::string> formats;
  };
  const std::vector<Expect> expected = {{"saylr3", {"bf16", "fp16", "fp16", "fp32", "fp32", "fp32"}},
                                        {"LeGresley_2508", {"q52", "fp32", "fp32", "fp32", "fp32", "fp32"}}};
  std::vector<std::string> missing;
  for (const auto& e : expected)
    if (find_fixture(e.name).empty()) missing.push_back(e.name + ".mtx");
  if (!missing.empty()) return skip("fixtures not found: " + joined(missing) + " (set HODLR_MP_DATA)");

  std::string detail;
  bool ok = true;
  for (const auto& e : expected) {
    const Eigen::MatrixXd raw = read_matrix_market(find_fixture(e.name));
    std::string matched;
    for (bool schur : {false, true}) {
      const Eigen::MatrixXd a = schur ? schur_complement_11(raw) : raw;
      const auto h = build_adaptive(a, build_tree(static_cast<std::size_t>(a.rows()), 6), 1e-4, formats::fp64(),
                                    formats::all_named());
      const auto got = h.plan.chosen_names();
      detail += e.name + (schur ? " (schur)" : " (raw)") + " {" + joined(got) + "}; ";
      if (got == e.formats) {
        matched = schur ? "schur" : "raw";
        break;
      }
    }
    if (matched.empty()) ok = false;
  }
  return ok ? pass(detail) : fail(detail);
}

// 5. Matvec backward error bound and the bf16 plateau.
Result matvec_bound_suite() {
  const std::vector<PrecisionFormat> workings = {formats::fp64(), formats::fp32(), formats::bf16()};
  std::size_t checked = 0, unmet = 0;
  double worst_ratio = 0.0;
  std::string plateau;
  for (const auto& m : kernel_suite()) {
    const auto n = static_cast<std::size_t>(m.a.rows());
    const CompressionCache cache(m.a, build_tree(n, 8));
    std::map<double, double> bf16_mean;
    for (double eps : decade_grid()) {
      for (const auto& w : workings) {
        const auto h = build_adaptive(cache, eps, w, formats::all_named());
        const bool hyp = precision_hypothesis(w, eps, n);
        const double bound = matvec_bound(8, eps);
        SplitMix64 rng(7);
        double sum = 0.0;
        for (int t = 0; t < 10; ++t) {
          const Eigen::VectorXd x = random_vector(n, rng);
          const double err = matvec_backward_error(m.a, x, matvec(h, x, w));
          sum += err;
          if (!hyp) continue;
          worst_ratio = std::max(worst_ratio, err / bound);
          if (err > bound)
            return fail(m.name + " eps " + sci(eps) + " " + w.name + ": error " + sci(err) + " > bound " + sci(bound));
        }
        hyp ? ++checked : ++unmet;
        if (w.name == "bf16") bf16_mean[eps] = sum / 10.0;
      }
    }
    const double a = bf16_mean.at(1e-10), b = bf16_mean.at(1e-7);
    const double spread = std::max(a, b) / std::min(a, b);
    plateau += m.name + " " + sci(spread) + " ";
    if (!(spread <= 10.0))
      return fail(m.name + ": bf16 errors at eps 1e-10 and 1e-7 differ by " + sci(spread) + "x");
  }
  return pass(std::to_string(checked) + " cells with u <= eps/n within bound (max error/bound " + sci(worst_ratio) +
              ", " + std::to_string(unmet) + " cells outside the hypothesis); bf16 plateau spreads " + plateau);
}

// 6. Near-exact fp64 matvec against the dense product.
Result matvec_oracle() {
  double worst = 0.0;
  for (const auto& m : kernel_suite()) {
    const auto n = static_cast<std::size_t>(m.a.rows());
    const auto h = build_uniform(m.a, build_tree(n, 8), 1e-14, fp64_levels(8), formats::fp64());
    const double tol = 1e3 * static_cast<double>(n) * kU64;
    SplitMix64 rng(99);
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd x = random_vector(n, rng);
      const Eigen::VectorXd ref = m.a * x;
      const double err = (matvec(h, x, formats::fp64()) - ref).norm() / ref.norm();
      worst = std::max(worst, err);
      if (err > tol) return fail(m.name + " vector " + std::to_string(t) + ": " + sci(err) + " > " + sci(tol));
    }
  }
  return pass("200 products, max relative error " + sci(worst) + " <= 1e3*n*u64 = " + sci(1e3 * 2000 * kU64));
}

struct LuTally {
  std::size_t checked = 0, unmet = 0, breakdowns = 0;
  double worst_ratio = 0.0;
  std::string failure;
};

void lu_cells(const std::string& name, const Eigen::MatrixXd& a, LuTally& t) {
  const auto n = static_cast<std::size_t>(a.rows());
  const double norm_a = a.norm();
  for (int depth : {2, 8}) {
    const CompressionCache cache(a, build_tree(n, depth));
    for (double eps : decade_grid())
      for (const auto& w : {formats::fp64(), formats::fp32(), formats::bf16()}) {
        const bool hyp = precision_hypothesis(w, eps, n);
        if (!hyp) {
          ++t.unmet;
          continue;
        }
        const auto h = build_adaptive(cache, eps, w, formats::all_named());
        try {
          const auto [l, u] = reconstruct_lu(lu(h, eps, w));
          const double residual = (l * u - a).norm();
          const double bound = lu_bound(depth, eps, norm_a, l.norm(), u.norm()) * norm_a;
          t.worst_ratio = std::max(t.worst_ratio, residual / bound);
          ++t.checked;
          if (residual > bound && t.failure.empty())
            t.failure = name + " depth " + std::to_string(depth) + " eps " + sci(eps) + " " + w.name + ": " +
                        sci(residual) + " > " + sci(bound);
        } catch (const PivotBreakdown&) {
          ++t.breakdowns;
        }
      }
  }
}

Result lu_summary(const LuTally& t) {
  const std::string counts = std::to_string(t.checked) + " cells checked, " + std::to_string(t.breakdowns) +
                             " pivot breakdowns, " + std::to_string(t.unmet) + " cells outside u <= eps/n";
  if (!t.failure.empty()) return fail(t.failure + " (" + counts + ")");
  return pass(counts + ", max residual/bound " + sci(t.worst_ratio));
}

// 7. LU backward error bound, random diagonally dominant part.
Result lu_bound_random() {
  LuTally t;
  for (std::size_t n : {256u, 512u}) lu_cells("randdd:" + std::to_string(n), diagonally_dominant_matrix(n, n), t);
  return lu_summary(t);
}

// 7. LU backward error bound, Schur complements of SuiteSparse matrices.
Result lu_bound_schur() {
  std::vector<std::string> missing;
  for (const std::string name : {"ex37", "P64", "psmigr_1"})
    if (find_fixture(name).empty()) missing.push_back(name + ".mtx");
  if (!missing.empty()) return skip("fixtures not found: " + joined(missing) + " (set HODLR_MP_DATA)");
  LuTally t;
  for (const std::string name : {"ex37", "P64", "psmigr_1"})
    lu_cells(name, schur_complement_11(read_matrix_market(find_fixture(name))), t);
  return lu_summary(t);
}

// 8. Storage ratios on the SuiteSparse fixture suite.
Result storage_suite() {
  const std::vector<std::string> names = {"1138_bus", "bcsstk08", "cavity18", "ex37",
                                          "LeGresley_2508", "P64", "psmigr_1", "saylr3"};
  std::vector<std::string> present;
  for (const auto& n : names)
    if (!find_fixture(n).empty()) present.push_back(n);
  if (present.empty()) return skip("no SuiteSparse fixtures found (set HODLR_MP_DATA)");
  double sum_loose = 0.0;
  std::string detail;
  for (const auto& name : present) {
    const Eigen::MatrixXd a = schur_complement_11(read_matrix_market(find_fixture(name)));
    const CompressionCache cache(a, build_tree(static_cast<std::size_t>(a.rows()), 8));
    const auto uniform = [&](double eps) { return build_uniform(cache, eps, fp64_levels(8), formats::fp64()); };
    const auto tight = build_adaptive(cache, 1e-7, formats::fp64(), formats::all_named());
    const double r_tight = storage_ratio(uniform(1e-7), tight);
    const auto names_tight = tight.plan.chosen_names();
    const bool all_fp64 = std::all_of(names_tight.begin(), names_tight.end(), [](auto& s) { return s == "fp64"; });
    if (all_fp64 && r_tight != 1.0) return fail(name + ": all-fp64 plan at eps 1e-7 gives ratio " + sci(r_tight));
    const double r_loose = storage_ratio(uniform(1e-1), build_adaptive(cache, 1e-1, formats::fp64(), formats::all_named()));
    sum_loose += r_loose;
    detail += name + " " + sci(r_tight) + "/" + sci(r_loose) + " ";
  }
  const double mean = sum_loose / static_cast<double>(present.size());
  const std::string d = std::to_string(present.size()) + " of 8 fixtures; ratios (1e-7/1e-1): " + detail +
                        "; mean at 1e-1 " + sci(mean);
  return mean >= 1.2 ? pass(d) : fail(d);
}

// 9. Triangular solve and LU structure properties.
Result structure_properties() {
  SplitMix64 rng(909);
  int instances = 0;
  while (instances < 100) {
    const int n = gen::uniform_int(8, 128, rng);
    const int depth = gen::uniform_int(1, 4, rng);
    if ((1 << depth) > n) continue;
    ++instances;
    const double eps = std::pow(10.0, -gen::uniform_int(4, 12, rng));
    const auto working = gen::uniform_int(0, 1, rng) ? formats::fp64() : formats::fp32();
    const Eigen::MatrixXd a = diagonally_dominant_matrix(static_cast<std::size_t>(n), rng.next());
    const auto h = build_adaptive(a, build_tree(static_cast<std::size_t>(n), depth), eps, working, formats::all_named());
    const auto f = lu(h, eps, working);
    const auto [l, u] = reconstruct_lu(f);
    const std::string where = "instance " + std::to_string(instances) + " (n " + std::to_string(n) + ")";
    if (!Eigen::MatrixXd(l.triangularView<Eigen::StrictlyUpper>()).isZero(0.0)) return fail(where + ": L not lower");
    if (!Eigen::MatrixXd(u.triangularView<Eigen::StrictlyLower>()).isZero(0.0)) return fail(where + ": U not upper");
    if (!(l.diagonal().array() == 1.0).all()) return fail(where + ": L diagonal not unit");

    const Arith arith(formats::fp64(), ArithMode::full_arithmetic);
    const int r = gen::uniform_int(1, 4, rng);
    const auto bl = gen::factor(n, gen::uniform_int(1, 10, rng), r, rng);
    const auto xl = solve_lower(f.L, bl, arith);
    if (xl.rank() != r) return fail(where + ": lower solve changed rank");
    if ((l * xl.dense() - bl.dense()).norm() > 1e-10 * l.norm() * xl.dense().norm() + 1e-12 * bl.dense().norm())
      return fail(where + ": lower solve residual");
    const auto br = gen::factor(gen::uniform_int(1, 10, rng), n, r, rng);
    const auto xr = solve_upper_right(br, f.U, arith);
    if (xr.rank() != r) return fail(where + ": upper solve changed rank");
    if ((xr.dense() * u - br.dense()).norm() > 1e-10 * u.norm() * xr.dense().norm() + 1e-12 * br.dense().norm())
      return fail(where + ": upper solve residual");
  }
  return pass("100 instances: triangular structure, unit diagonal, solve rank preservation and residuals");
}

struct Criterion {
  std::string id;
  std::string title;
  std::function<Result()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"1", "rounding oracle", rounding_oracle},
      {"2", "construction bound", construction_bound_suite},
      {"3", "diagonal block error", diagonal_block_suite},
      {"4", "per-level precision choices", precision_choices},
      {"5", "matvec bound and plateau", matvec_bound_suite},
      {"6", "matvec oracle", matvec_oracle},
      {"7-random", "LU bound, diagonally dominant", lu_bound_random},
      {"7-schur", "LU bound, Schur complements", lu_bound_schur},
      {"8", "storage ratios", storage_suite},
      {"9", "solve and LU structure", structure_properties},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool any_fail = false, any_skip = false;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = r.status == Status::pass ? "PASS" : r.status == Status::fail ? "FAIL" : "SKIP";
    std::ostringstream t;
    t.precision(1);
    t << std::fixed << secs;
    std::cout << "criterion " << c.id << " (" << c.title << "): " << tag << " [" << t.str() << "s] " << r.detail
              << std::endl;
    any_fail |= r.status == Status::fail;
    any_skip |= r.status == Status::skip;
  }
  if (any_fail) return 1;
  return any_skip ? 77 : 0;
}
