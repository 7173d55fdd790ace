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
#include "sources.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include "hodlrmp/problems.hpp"

namespace hodlrmp::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = s.find(sep, start)) != std::string::npos; start = pos + 1)
    out.push_back(s.substr(start, pos - start));
  out.push_back(s.substr(start));
  return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& what, const std::string& source) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument("source '" + source + "': invalid " + what + " '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what, const std::string& source) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("source '" + source + "': invalid " + what + " '" + s + "'");
}

std::size_t parse_size(const std::string& s, const std::string& source) {
  const auto n = parse_number<std::size_t>(s, "size", source);
  if (n == 0) throw std::invalid_argument("source '" + source + "': size must be positive");
  return n;
}

}  // namespace

MatrixSource parse_source(const std::string& text) {
  MatrixSource src;
  src.text = text;
  if (text.starts_with("mat-")) {
    src.kind = MatrixSource::Kind::test_kernel;
    const std::string num = text.substr(4);
    if (num.size() != 1 || num[0] < '1' || num[0] > '4')
      throw std::invalid_argument("source '" + text + "': expected mat-1 .. mat-4");
    src.kernel = num[0] - '0';
    src.n = 2000;
    return src;
  }
  if (text.starts_with("mtx:")) {
    src.kind = MatrixSource::Kind::mtx;
    src.path = text.substr(4);
    if (src.path.ends_with(":schur")) {
      src.schur = true;
      src.path.resize(src.path.size() - 6);
    }
    if (src.path.empty()) throw std::invalid_argument("source '" + text + "': missing file path");
    return src;
  }

  const auto parts = split(text, ':');
  const std::string& scheme = parts[0];
  if (scheme == "kernel") {
    if (parts.size() < 3 || parts.size() > 4)
      throw std::invalid_argument("source '" + text + "': expected kernel:<i|ii|iii>:<n>[:h=<value>]");
    src.kind = MatrixSource::Kind::kernel;
    if (parts[1] == "i") src.kernel = 1;
    else if (parts[1] == "ii") src.kernel = 2;
    else if (parts[1] == "iii") src.kernel = 3;
    else throw std::invalid_argument("source '" + text + "': kernel kind must be i, ii or iii");
    src.n = parse_size(parts[2], text);
    if (parts.size() == 4) {
      if (!parts[3].starts_with("h=")) throw std::invalid_argument("source '" + text + "': expected h=<value>");
      src.h = parse_double(parts[3].substr(2), "bandwidth", text);
      if (!(src.h > 0.0)) throw std::invalid_argument("source '" + text + "': bandwidth must be positive");
    }
    return src;
  }
  if (scheme == "random" || scheme == "randdd") {
    if (parts.size() != 3) throw std::invalid_argument("source '" + text + "': expected " + scheme + ":<n>:<seed>");
    src.kind = scheme == "random" ? MatrixSource::Kind::random : MatrixSource::Kind::random_dd;
    src.n = parse_size(parts[1], text);
    src.seed = parse_number<std::uint64_t>(parts[2], "seed", text);
    return src;
  }
  if (scheme == "identity") {
    if (parts.size() != 2) throw std::invalid_argument("source '" + text + "': expected identity:<n>");
    src.kind = MatrixSource::Kind::identity;
    src.n = parse_size(parts[1], text);
    return src;
  }
  throw std::invalid_argument("unknown matrix source '" + text +
                              "' (expected kernel:, mat-1..4, mtx:, random:, randdd: or identity:)");
}

std::string resolve_fixture(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("HODLR_MP_DATA")) {
    const fs::path p = fs::path(dir) / path;
    if (fs::exists(p)) return p.string();
  }
  throw std::runtime_error("matrix file '" + path + "' not found (set HODLR_MP_DATA to the fixture directory)");
}

Eigen::MatrixXd load_source(const MatrixSource& src) {
  switch (src.kind) {
    case MatrixSource::Kind::test_kernel:
      return test_kernel_matrix(src.kernel, src.n);
    case MatrixSource::Kind::kernel: {
      if (src.kernel == 1) return kernel_matrix({KernelKind::inverse_distance, src.h}, grid_1d(src.n));
      if (src.kernel == 2) return kernel_matrix({KernelKind::log_distance, src.h}, grid_2d(src.n));
      return kernel_matrix({KernelKind::gaussian, src.h}, grid_2d(src.n));
    }
    case MatrixSource::Kind::mtx: {
      Eigen::MatrixXd a = read_matrix_market(resolve_fixture(src.path));
      return src.schur ? schur_complement_11(a) : a;
    }
    case MatrixSource::Kind::random:
      return random_matrix(src.n, src.seed);
    case MatrixSource::Kind::random_dd:
      return diagonally_dominant_matrix(src.n, src.seed);
    case MatrixSource::Kind::identity:
      break;
  }
  const auto n = static_cast<Eigen::Index>(src.n);
  return Eigen::MatrixXd::Identity(n, n);
}

}  // namespace hodlrmp::cli
