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
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hodlrmp {

/// Simulated binary floating-point format.
///
/// All values live in binary64; a format only restricts which binary64
/// values are representable. Requires 2 <= t <= 53 and an exponent range
/// inside binary64's, so every rounded value is exact in a double.
struct PrecisionFormat {
  std::string name;
  int t = 53;       // significand digits, implicit bit included
  int e_min = -1022;
  int e_max = 1023;
  int bits = 64;    // storage width used for accounting
  bool subnormals = true;

  double unit_roundoff() const;
  double x_min() const;  // smallest positive normal
  double x_max() const;  // largest finite

  bool operator==(const PrecisionFormat&) const = default;
};

namespace formats {
PrecisionFormat q52();
PrecisionFormat bf16();
PrecisionFormat fp16();
PrecisionFormat fp32();
PrecisionFormat fp64();
/// The five named formats ordered from lowest to highest precision.
std::vector<PrecisionFormat> all_named();
}  // namespace formats

/// Parses "q52|bf16|fp16|fp32|fp64" or
/// "custom:t=<int>,emin=<int>,emax=<int>,bits=<int>[,subnormals=0|1]".
PrecisionFormat parse_format(std::string_view text);
/// Comma-separated list of format names.
std::vector<PrecisionFormat> parse_format_list(std::string_view text);

void validate(const PrecisionFormat& fmt);

double unit_roundoff(const PrecisionFormat& fmt);
int bits_per_scalar(const PrecisionFormat& fmt);

/// Round to nearest, ties to even. Overflow goes to +-inf, values below
/// the (sub)normal range go to +-0.
double round_scalar(double x, const PrecisionFormat& fmt);

Eigen::MatrixXd round_matrix(const Eigen::MatrixXd& a, const PrecisionFormat& fmt);
void round_in_place(Eigen::Ref<Eigen::MatrixXd> a, const PrecisionFormat& fmt);

bool is_representable(const Eigen::MatrixXd& a, const PrecisionFormat& fmt);

/// How a kernel executes arithmetic in its working format.
enum class ArithMode {
  storage_only,    // binary64 arithmetic, rounding only on store
  full_arithmetic  // every scalar add/multiply rounded to the working format
};

ArithMode parse_arith_mode(std::string_view text);
std::string_view to_string(ArithMode mode);

/// Scalar arithmetic in a simulated working format.
///
/// In full-arithmetic mode each operation result is rounded; operands are
/// assumed to be representable already (see `load`).
class Arith {
 public:
  Arith(PrecisionFormat fmt, ArithMode mode);

  const PrecisionFormat& format() const { return fmt_; }
  ArithMode mode() const { return mode_; }
  bool rounds() const { return rounds_; }

  /// Cast a stored value into the working format.
  double load(double x) const { return rounds_ ? round_scalar(x, fmt_) : x; }
  /// Round a result into the working format regardless of mode.
  double store(double x) const { return identity_ ? x : round_scalar(x, fmt_); }
  double add(double a, double b) const { return r(a + b); }
  double sub(double a, double b) const { return r(a - b); }
  double mul(double a, double b) const { return r(a * b); }
  double div(double a, double b) const { return r(a / b); }
  /// acc + a*b with two roundings (no fused multiply-add).
  double mul_add(double acc, double a, double b) const { return r(acc + r(a * b)); }

  Eigen::MatrixXd load(const Eigen::MatrixXd& a) const;
  void store(Eigen::Ref<Eigen::MatrixXd> a) const;

 private:
  double r(double x) const { return rounds_ ? round_scalar(x, fmt_) : x; }

  PrecisionFormat fmt_;
  ArithMode mode_;
  bool rounds_;
  bool identity_;
};

}  // namespace hodlrmp
