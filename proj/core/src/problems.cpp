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
#include "hodlrmp/problems.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hodlrmp {

namespace {

using Eigen::Index;

std::string lower_case(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  throw std::runtime_error(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

PointSet grid_1d(std::size_t n) {
  if (n == 0) throw std::invalid_argument("grid_1d needs at least one point");
  PointSet p;
  p.dim = 1;
  p.coords.resize(static_cast<Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i)
    p.coords(static_cast<Index>(i), 0) = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
  return p;
}

PointSet grid_2d(std::size_t n) {
  if (n == 0) throw std::invalid_argument("grid_2d needs at least one point");
  std::size_t m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (m * m < n) ++m;
  while (m > 1 && (m - 1) * (m - 1) >= n) --m;
  auto axis = [m](std::size_t i) {
    return m == 1 ? -1.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(m - 1);
  };
  PointSet p;
  p.dim = 2;
  p.coords.resize(static_cast<Index>(n), 2);
  for (std::size_t k = 0; k < n; ++k) {
    p.coords(static_cast<Index>(k), 0) = axis(k / m);
    p.coords(static_cast<Index>(k), 1) = axis(k % m);
  }
  return p;
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const PointSet& pts) {
  const Index n = pts.coords.rows();
  Eigen::MatrixXd k(n, n);
  switch (spec.kind) {
    case KernelKind::inverse_distance:
      if (pts.dim != 1) throw std::invalid_argument("inverse-distance kernel is defined on 1D points only");
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
          const double d = pts.coords(i, 0) - pts.coords(j, 0);
          k(i, j) = d == 0.0 ? 1.0 : 1.0 / d;
        }
      break;
    case KernelKind::log_distance:
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
          const double d = (pts.coords.row(i) - pts.coords.row(j)).norm();
          k(i, j) = d == 0.0 ? 0.0 : std::log(d);
        }
      break;
    case KernelKind::gaussian:
      if (!(spec.h > 0.0)) throw std::invalid_argument("gaussian kernel bandwidth must be positive");
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
          const double d2 = (pts.coords.row(i) - pts.coords.row(j)).squaredNorm();
          k(i, j) = std::exp(-d2 / (2.0 * spec.h * spec.h));
        }
      break;
  }
  return k;
}

Eigen::MatrixXd test_kernel_matrix(int which, std::size_t n) {
  switch (which) {
    case 1: return kernel_matrix({KernelKind::inverse_distance, 1.0}, grid_1d(n));
    case 2: return kernel_matrix({KernelKind::log_distance, 1.0}, grid_2d(n));
    case 3: return kernel_matrix({KernelKind::gaussian, 1.0}, grid_2d(n));
    case 4: return kernel_matrix({KernelKind::gaussian, 20.0}, grid_2d(n));
    default: throw std::invalid_argument("kernel test matrix number must be 1..4");
  }
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::uniform_pm1() {
  // midpoint of one of 2^53 equal cells of [0, 1): strictly inside (0, 1)
  const double u = (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53;
  return 2.0 * u - 1.0;
}

Eigen::VectorXd random_vector(std::size_t n, SplitMix64& rng) {
  Eigen::VectorXd x(static_cast<Index>(n));
  for (Index i = 0; i < x.size(); ++i) x(i) = rng.uniform_pm1();
  return x;
}

Eigen::MatrixXd random_matrix(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Eigen::MatrixXd a(static_cast<Index>(n), static_cast<Index>(n));
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) a(i, j) = rng.uniform_pm1();
  return a;
}

Eigen::MatrixXd diagonally_dominant_matrix(std::size_t n, std::uint64_t seed) {
  Eigen::MatrixXd a = random_matrix(n, seed);
  a.diagonal().array() += static_cast<double>(n);
  return a;
}

Eigen::MatrixXd read_matrix_market(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) parse_error(source, 1, "empty file");
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, layout, field, symmetry;
  header >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%MatrixMarket") parse_error(source, lineno, "missing %%MatrixMarket banner");
  object = lower_case(object);
  layout = lower_case(layout);
  field = lower_case(field);
  symmetry = lower_case(symmetry);
  if (object != "matrix") parse_error(source, lineno, "unsupported object '" + object + "'");
  if (layout != "coordinate" && layout != "array") parse_error(source, lineno, "unsupported layout '" + layout + "'");
  if (field == "complex") parse_error(source, lineno, "complex matrices are not supported");
  if (field != "real" && field != "integer")
    parse_error(source, lineno, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    parse_error(source, lineno, "unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  // skip comments and blank lines up to the size line
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] != '%' && line.find_first_not_of(" \t\r") != std::string::npos) break;
    line.clear();
  }
  if (line.empty()) parse_error(source, lineno, "missing size line");
  std::istringstream size_line(line);
  long long rows = 0, cols = 0, entries = 0;
  if (layout == "coordinate") {
    if (!(size_line >> rows >> cols >> entries)) parse_error(source, lineno, "malformed size line");
  } else {
    if (!(size_line >> rows >> cols)) parse_error(source, lineno, "malformed size line");
  }
  if (rows <= 0 || cols <= 0) parse_error(source, lineno, "nonpositive dimensions");
  if (rows != cols) parse_error(source, lineno, "matrix is not square (" + std::to_string(rows) + "x" + std::to_string(cols) + ")");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      if (out.empty() || out[0] == '%' || out.find_first_not_of(" \t\r") == std::string::npos) continue;
      return true;
    }
    return false;
  };

  if (layout == "coordinate") {
    for (long long e = 0; e < entries; ++e) {
      if (!next_data_line(line)) parse_error(source, lineno, "expected " + std::to_string(entries) + " entries, file ended after " + std::to_string(e));
      std::istringstream ls(line);
      long long i = 0, j = 0;
      double v = 0.0;
      if (!(ls >> i >> j >> v)) parse_error(source, lineno, "malformed entry");
      if (i < 1 || i > rows || j < 1 || j > cols) parse_error(source, lineno, "index out of range");
      a(i - 1, j - 1) += v;
      if (symmetric && i != j) a(j - 1, i - 1) += v;
    }
  } else {
    // column-major; symmetric stores the lower triangle only
    for (long long j = 0; j < cols; ++j) {
      for (long long i = symmetric ? j : 0; i < rows; ++i) {
        if (!next_data_line(line)) parse_error(source, lineno, "file ended before all array entries were read");
        std::istringstream ls(line);
        double v = 0.0;
        if (!(ls >> v)) parse_error(source, lineno, "malformed value");
        a(i, j) = v;
        if (symmetric) a(j, i) = v;
      }
    }
  }
  return a;
}

Eigen::MatrixXd read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MatrixMarket file '" + path + "'");
  return read_matrix_market(in, path);
}

std::size_t matrix_market_stored_entries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MatrixMarket file '" + path + "'");
  std::string line, banner, object, layout, field, symmetry;
  std::getline(in, line);
  std::istringstream(line) >> banner >> object >> layout >> field >> symmetry;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream ls(line);
  long long rows = 0, cols = 0, entries = 0;
  ls >> rows >> cols;
  if (lower_case(layout) == "coordinate") {
    ls >> entries;
    return static_cast<std::size_t>(entries);
  }
  return static_cast<std::size_t>(rows * cols);
}

void write_matrix_market(const Eigen::MatrixXd& a, std::ostream& out) {
  std::size_t nnz = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != 0.0) ++nnz;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << a(i, j) << '\n';
}

void write_matrix_market(const Eigen::MatrixXd& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_matrix_market(a, out);
}

Eigen::MatrixXd schur_complement_11(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("schur_complement_11 needs a square matrix");
  const Index n = a.rows();
  if (n < 2) throw std::invalid_argument("schur_complement_11 needs n >= 2");
  const Index m = (n + 1) / 2;
  const Index s = n - m;
  const Eigen::MatrixXd a11 = a.topLeftCorner(m, m);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a11);
  // reciprocal condition estimate catches exactly and numerically singular blocks
  const double rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon()))
    throw std::domain_error("leading block is singular (rcond = " + std::to_string(rcond) + ")");
  return a.bottomRightCorner(s, s) - a.bottomLeftCorner(s, m) * lu.solve(a.topRightCorner(m, s));
}

}  // namespace hodlrmp
