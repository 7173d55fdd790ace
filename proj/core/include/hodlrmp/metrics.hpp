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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hodlrmp/fpsim.hpp"
#include "hodlrmp/hodlr.hpp"
#include "hodlrmp/linops.hpp"

namespace hodlrmp {

/// A measured error against its bound. All metrics run in binary64.
struct ErrorReport {
  double measured = 0.0;
  double bound = 0.0;
  bool satisfied = false;
  /// Whether the bound's precision hypothesis (e.g. u <= eps/n) holds.
  bool hypothesis_met = true;

  int depth = 0;
  double eps = 0.0;
  std::string working;
  std::string matrix_id;
  std::vector<std::string> flags;

  /// "ok", "violated", or "hypothesis-unmet".
  std::string verdict() const;
};

ErrorReport make_report(double measured, double bound, bool hypothesis_met = true);

/// ||A - H||_F / ||A||_F.
double construction_error(const Eigen::MatrixXd& a, const HodlrMatrix& h);
/// (2 sqrt(2 ell) + 1) eps.
double construction_bound(int ell, double eps);
/// (2 sqrt(2 (ell - level)) + 1) eps for level-`level` diagonal blocks.
double local_construction_bound(int ell, int level, double eps);

/// ||b_hat - K x||_2 / (||K||_F ||x||_2), reference product in binary64.
double matvec_backward_error(const Eigen::MatrixXd& k, const Eigen::VectorXd& x, const Eigen::VectorXd& b_hat);
/// 2 (sqrt 2 + 1) sqrt(2^(ell+1) + 2^(ell-1)) eps.
double matvec_bound(int ell, double eps);

/// ||L U - A||_F / ||A||_F with the factors densified.
double lu_backward_error(const Eigen::MatrixXd& a, const HodlrLuFactors& f);
double lu_backward_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& l, const Eigen::MatrixXd& u);
/// (2 (2^ell - 1) eps normA + 11 (2^ell - 1) eps normL normU) / normA.
double lu_bound(int ell, double eps, double norm_a, double norm_l, double norm_u);

/// u <= eps / n, the working-precision condition of the matvec and LU bounds.
bool precision_hypothesis(const PrecisionFormat& working, double eps, std::size_t n);

/// storage_bits(uniform) / storage_bits(adaptive).
double storage_ratio(const HodlrMatrix& uniform, const HodlrMatrix& adaptive);

/// gamma_n = n u / (1 - n u); infinite once n u >= 1.
double gamma(std::size_t n, double u);

}  // namespace hodlrmp
