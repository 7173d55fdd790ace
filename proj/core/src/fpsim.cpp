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
#include "hodlrmp/fpsim.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace hodlrmp {

namespace {

bool is_binary64(const PrecisionFormat& f) {
  return f.t == 53 && f.e_min == -1022 && f.e_max == 1023 && f.subnormals;
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("invalid integer for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

double PrecisionFormat::unit_roundoff() const { return std::ldexp(1.0, -t); }
double PrecisionFormat::x_min() const { return std::ldexp(1.0, e_min); }
double PrecisionFormat::x_max() const {
  return std::ldexp(2.0 - std::ldexp(1.0, 1 - t), e_max);
}

namespace formats {
// q52: 1 sign, 5 exponent, 2 stored significand bits.
PrecisionFormat q52() { return {"q52", 3, -14, 15, 8, true}; }
PrecisionFormat bf16() { return {"bf16", 8, -126, 127, 16, true}; }
PrecisionFormat fp16() { return {"fp16", 11, -14, 15, 16, true}; }
PrecisionFormat fp32() { return {"fp32", 24, -126, 127, 32, true}; }
PrecisionFormat fp64() { return {"fp64", 53, -1022, 1023, 64, true}; }
std::vector<PrecisionFormat> all_named() { return {q52(), bf16(), fp16(), fp32(), fp64()}; }
}  // namespace formats

void validate(const PrecisionFormat& f) {
  if (f.t < 2 || f.t > 53) throw std::invalid_argument("format " + f.name + ": t must lie in [2, 53]");
  if (f.e_min >= f.e_max) throw std::invalid_argument("format " + f.name + ": e_min must be below e_max");
  if (f.e_min < -1022 || f.e_max > 1023)
    throw std::invalid_argument("format " + f.name + ": exponent range exceeds binary64");
  if (f.bits <= 0) throw std::invalid_argument("format " + f.name + ": storage width must be positive");
}

PrecisionFormat parse_format(std::string_view text) {
  text = trim(text);
  for (auto& f : formats::all_named())
    if (text == f.name) return f;
  constexpr std::string_view prefix = "custom:";
  if (!text.starts_with(prefix)) throw std::invalid_argument("unknown precision format '" + std::string(text) + "'");

  PrecisionFormat f{std::string(text), 0, 0, 0, 0, true};
  bool have_t = false, have_emin = false, have_emax = false, have_bits = false;
  std::string_view rest = text.substr(prefix.size());
  while (!rest.empty()) {
    auto comma = rest.find(',');
    auto item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("custom format: expected key=value, got '" + std::string(item) + "'");
    auto key = item.substr(0, eq);
    auto val = item.substr(eq + 1);
    if (key == "t") { f.t = parse_int(val, key); have_t = true; }
    else if (key == "emin") { f.e_min = parse_int(val, key); have_emin = true; }
    else if (key == "emax") { f.e_max = parse_int(val, key); have_emax = true; }
    else if (key == "bits") { f.bits = parse_int(val, key); have_bits = true; }
    else if (key == "subnormals") { f.subnormals = parse_int(val, key) != 0; }
    else throw std::invalid_argument("custom format: unknown key '" + std::string(key) + "'");
  }
  if (!(have_t && have_emin && have_emax && have_bits))
    throw std::invalid_argument("custom format requires t, emin, emax and bits");
  validate(f);
  return f;
}

std::vector<PrecisionFormat> parse_format_list(std::string_view text) {
  std::vector<PrecisionFormat> out;
  // custom formats contain commas themselves, so split on commas that
  // start a new recognizable item
  std::string_view rest = trim(text);
  while (!rest.empty()) {
    std::size_t end = rest.size();
    if (rest.starts_with("custom:")) {
      // custom spec runs until the next comma followed by a named format or "custom:"
      std::size_t pos = 0;
      while ((pos = rest.find(',', pos + 1)) != std::string_view::npos) {
        auto tail = trim(rest.substr(pos + 1));
        bool next_item = tail.starts_with("custom:");
        for (auto& f : formats::all_named())
          if (tail.starts_with(f.name) && (tail.size() == f.name.size() || tail[f.name.size()] == ',')) next_item = true;
        if (next_item) { end = pos; break; }
      }
    } else {
      end = std::min(rest.find(','), rest.size());
    }
    out.push_back(parse_format(rest.substr(0, end)));
    rest = end >= rest.size() ? std::string_view{} : trim(rest.substr(end + 1));
  }
  if (out.empty()) throw std::invalid_argument("empty format list");
  return out;
}

double unit_roundoff(const PrecisionFormat& fmt) { return fmt.unit_roundoff(); }

int bits_per_scalar(const PrecisionFormat& fmt) {
  if (fmt.bits <= 0) throw std::invalid_argument("format '" + fmt.name + "' has no declared storage width");
  return fmt.bits;
}

double round_scalar(double x, const PrecisionFormat& fmt) {
  if (is_binary64(fmt) || x == 0.0 || !std::isfinite(x)) return x;

  const double ax = std::fabs(x);
  int e2 = 0;
  std::frexp(ax, &e2);
  const int exponent = e2 - 1;  // ax in [2^exponent, 2^(exponent+1))
  if (exponent > fmt.e_max) return std::copysign(std::numeric_limits<double>::infinity(), x);

  double r;
  if (exponent >= fmt.e_min) {
    // Drop the low 53 - t significand bits with round-half-even. A carry
    // out of the significand bumps the exponent, which is still correct.
    const int drop = 53 - fmt.t;
    if (drop == 0) {
      r = ax;
    } else {
      auto bits = std::bit_cast<std::uint64_t>(ax);
      const std::uint64_t half = std::uint64_t{1} << (drop - 1);
      const std::uint64_t lsb = (bits >> drop) & 1u;
      bits += half - 1 + lsb;
      bits &= ~((std::uint64_t{1} << drop) - 1);
      r = std::bit_cast<double>(bits);
    }
  } else if (fmt.subnormals) {
    // fixed spacing below x_min; the scaling by a power of two is exact
    const int q = fmt.e_min - fmt.t + 1;
    r = std::ldexp(std::nearbyint(std::ldexp(ax, -q)), q);
  } else {
    // flush: nearest of {0, x_min}, ties to zero
    const double xmin = fmt.x_min();
    r = ax > 0.5 * xmin ? xmin : 0.0;
  }
  if (r > fmt.x_max()) r = std::numeric_limits<double>::infinity();
  return std::copysign(r, x);
}

void round_in_place(Eigen::Ref<Eigen::MatrixXd> a, const PrecisionFormat& fmt) {
  if (is_binary64(fmt)) return;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = round_scalar(a(i, j), fmt);
}

Eigen::MatrixXd round_matrix(const Eigen::MatrixXd& a, const PrecisionFormat& fmt) {
  Eigen::MatrixXd out = a;
  round_in_place(out, fmt);
  return out;
}

bool is_representable(const Eigen::MatrixXd& a, const PrecisionFormat& fmt) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (round_scalar(a(i, j), fmt) != a(i, j)) return false;
  return true;
}

ArithMode parse_arith_mode(std::string_view text) {
  if (text == "storage-only") return ArithMode::storage_only;
  if (text == "full-arithmetic") return ArithMode::full_arithmetic;
  throw std::invalid_argument("unknown arithmetic mode '" + std::string(text) + "'");
}

std::string_view to_string(ArithMode mode) {
  return mode == ArithMode::storage_only ? "storage-only" : "full-arithmetic";
}

Arith::Arith(PrecisionFormat fmt, ArithMode mode)
    : fmt_(std::move(fmt)),
      mode_(mode),
      rounds_(mode == ArithMode::full_arithmetic && !is_binary64(fmt_)),
      identity_(is_binary64(fmt_)) {
  validate(fmt_);
}

Eigen::MatrixXd Arith::load(const Eigen::MatrixXd& a) const {
  if (!rounds_) return a;
  return round_matrix(a, fmt_);
}

void Arith::store(Eigen::Ref<Eigen::MatrixXd> a) const {
  if (!identity_) round_in_place(a, fmt_);
}

}  // namespace hodlrmp
