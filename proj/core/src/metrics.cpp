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
#include "hodlrmp/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hodlrmp {

namespace {

void check_depth(int ell) {
  if (ell < 1) throw std::invalid_argument("bound requires depth >= 1");
}

}  // namespace

std::string ErrorReport::verdict() const {
  if (!hypothesis_met) return "hypothesis-unmet";
  return satisfied ? "ok" : "violated";
}

ErrorReport make_report(double measured, double bound, bool hypothesis_met) {
  ErrorReport r;
  r.measured = measured;
  r.bound = bound;
  r.satisfied = measured <= bound;
  r.hypothesis_met = hypothesis_met;
  return r;
}

double construction_error(const Eigen::MatrixXd& a, const HodlrMatrix& h) {
  const double na = a.norm();
  if (na == 0.0) throw std::domain_error("construction error undefined for a zero matrix");
  return (a - reconstruct_dense(h)).norm() / na;
}

double construction_bound(int ell, double eps) {
  check_depth(ell);
  return (2.0 * std::sqrt(2.0 * ell) + 1.0) * eps;
}

double local_construction_bound(int ell, int level, double eps) {
  if (level < 0 || level > ell) throw std::invalid_argument("level outside [0, depth]");
  return (2.0 * std::sqrt(2.0 * (ell - level)) + 1.0) * eps;
}

double matvec_backward_error(const Eigen::MatrixXd& k, const Eigen::VectorXd& x, const Eigen::VectorXd& b_hat) {
  const double nk = k.norm(), nx = x.norm();
  if (nk == 0.0 || nx == 0.0) throw std::domain_error("backward error undefined for zero K or x");
  return (b_hat - k * x).norm() / (nk * nx);
}

double matvec_bound(int ell, double eps) {
  check_depth(ell);
  return 2.0 * (std::sqrt(2.0) + 1.0) * std::sqrt(std::ldexp(1.0, ell + 1) + std::ldexp(1.0, ell - 1)) * eps;
}

double lu_backward_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& l, const Eigen::MatrixXd& u) {
  const double na = a.norm();
  if (na == 0.0) throw std::domain_error("LU backward error undefined for a zero matrix");
  return (l * u - a).norm() / na;
}

double lu_backward_error(const Eigen::MatrixXd& a, const HodlrLuFactors& f) {
  const auto [l, u] = reconstruct_lu(f);
  return lu_backward_error(a, l, u);
}

double lu_bound(int ell, double eps, double norm_a, double norm_l, double norm_u) {
  check_depth(ell);
  if (norm_a == 0.0) throw std::domain_error("LU bound undefined for a zero matrix");
  if (norm_a < 0.0 || norm_l < 0.0 || norm_u < 0.0) throw std::invalid_argument("norms must be nonnegative");
  const double c = std::ldexp(1.0, ell) - 1.0;
  return (2.0 * c * eps * norm_a + 11.0 * c * eps * norm_l * norm_u) / norm_a;
}

bool precision_hypothesis(const PrecisionFormat& working, double eps, std::size_t n) {
  return working.unit_roundoff() <= eps / static_cast<double>(n);
}

double storage_ratio(const HodlrMatrix& uniform, const HodlrMatrix& adaptive) {
  return static_cast<double>(storage_bits(uniform)) / static_cast<double>(storage_bits(adaptive));
}

double gamma(std::size_t n, double u) {
  const double nu = static_cast<double>(n) * u;
  if (nu >= 1.0) return std::numeric_limits<double>::infinity();
  return nu / (1.0 - nu);
}

}  // namespace hodlrmp
