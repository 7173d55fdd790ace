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
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "hodlrmp/hodlr.hpp"

namespace hodlrmp {

namespace {

static_assert(std::endian::native == std::endian::little, "container is written little-endian");

constexpr char kMagic[8] = {'H', 'O', 'D', 'L', 'R', 'M', 'P', '\0'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("truncated HODLR container");
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto len = get<std::uint32_t>(in);
  if (len > 4096) throw std::runtime_error("corrupt HODLR container: oversized string");
  std::string s(len, '\0');
  if (!in.read(s.data(), len)) throw std::runtime_error("truncated HODLR container");
  return s;
}

void put_format(std::ostream& out, const PrecisionFormat& f) {
  put_string(out, f.name);
  put<std::int32_t>(out, f.t);
  put<std::int32_t>(out, f.e_min);
  put<std::int32_t>(out, f.e_max);
  put<std::int32_t>(out, f.bits);
  put<std::uint8_t>(out, f.subnormals ? 1 : 0);
}

PrecisionFormat get_format(std::istream& in) {
  PrecisionFormat f;
  f.name = get_string(in);
  f.t = get<std::int32_t>(in);
  f.e_min = get<std::int32_t>(in);
  f.e_max = get<std::int32_t>(in);
  f.bits = get<std::int32_t>(in);
  f.subnormals = get<std::uint8_t>(in) != 0;
  validate(f);
  return f;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Eigen::MatrixXd get_matrix(std::istream& in) {
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  if (rows > (std::uint64_t{1} << 32) || cols > (std::uint64_t{1} << 32))
    throw std::runtime_error("corrupt HODLR container: matrix too large");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
    throw std::runtime_error("truncated HODLR container");
  return m;
}

}  // namespace

void save_hodlr(const HodlrMatrix& h, std::ostream& out) {
  validate(h);
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kHodlrFormatVersion);
  put<std::uint64_t>(out, h.n());
  put<std::int32_t>(out, h.depth());
  put<double>(out, h.eps);
  put_format(out, h.working_format);
  for (const auto& lp : h.plan.levels) {
    put<double>(out, lp.xi);
    put<double>(out, lp.threshold);
    put_format(out, lp.chosen);
    put<std::uint8_t>(out, lp.fallback ? 1 : 0);
  }
  const std::size_t branches = h.tree.node_count() - h.tree.leaf_count();
  for (std::size_t id = 0; id < branches; ++id) {
    for (const LowRankFactor* f : {&h.upper[id], &h.lower[id]}) {
      put_matrix(out, f->U);
      put_matrix(out, f->V);
    }
  }
  for (const auto& d : h.leaves) put_matrix(out, d);
  if (!out) throw std::runtime_error("failed writing HODLR container");
}

HodlrMatrix load_hodlr(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a HODLR container (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kHodlrFormatVersion)
    throw std::runtime_error("unsupported HODLR container version " + std::to_string(version));

  HodlrMatrix h;
  const auto n = get<std::uint64_t>(in);
  const auto depth = get<std::int32_t>(in);
  h.tree = ClusterTree(static_cast<std::size_t>(n), depth);
  h.eps = get<double>(in);
  h.working_format = get_format(in);
  for (int k = 0; k < depth; ++k) {
    LevelPrecision lp;
    lp.xi = get<double>(in);
    lp.threshold = get<double>(in);
    lp.chosen = get_format(in);
    lp.fallback = get<std::uint8_t>(in) != 0;
    h.plan.levels.push_back(std::move(lp));
  }
  h.upper.resize(h.tree.node_count());
  h.lower.resize(h.tree.node_count());
  const std::size_t branches = h.tree.node_count() - h.tree.leaf_count();
  for (std::size_t id = 0; id < branches; ++id) {
    const auto& fmt = h.plan.levels[ClusterTree::level_of(id)].chosen;
    for (LowRankFactor* f : {&h.upper[id], &h.lower[id]}) {
      auto u = get_matrix(in);
      auto v = get_matrix(in);
      *f = LowRankFactor(std::move(u), std::move(v), fmt);
    }
  }
  for (std::size_t i = 0; i < h.tree.leaf_count(); ++i) h.leaves.push_back(get_matrix(in));
  validate(h);
  return h;
}

void save_hodlr(const HodlrMatrix& h, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_hodlr(h, out);
}

HodlrMatrix load_hodlr(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_hodlr(in);
}

}  // namespace hodlrmp
