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
#include <benchmark/benchmark.h>

#include <map>
#include <string>
#include <vector>

#include "hodlrmp/fpsim.hpp"
#include "hodlrmp/hodlr.hpp"
#include "hodlrmp/linops.hpp"
#include "hodlrmp/problems.hpp"

using namespace hodlrmp;

namespace {

const Eigen::MatrixXd& kernel(std::size_t n) {
  static std::map<std::size_t, Eigen::MatrixXd> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, test_kernel_matrix(1, n)).first;
  return it->second;
}

void BM_RoundScalar(benchmark::State& state) {
  const auto fmt = formats::all_named()[static_cast<std::size_t>(state.range(0))];
  SplitMix64 rng(1);
  std::vector<double> xs(4096);
  for (auto& x : xs) x = rng.uniform_pm1();
  for (auto _ : state)
    for (double x : xs) benchmark::DoNotOptimize(round_scalar(x, fmt));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
  state.SetLabel(fmt.name);
}
BENCHMARK(BM_RoundScalar)->DenseRange(0, 4);

void BM_CompressionCache(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ClusterTree tree(n, depth_for_min_leaf(n, 16));
  for (auto _ : state) benchmark::DoNotOptimize(CompressionCache(kernel(n), tree).total_norm_sq());
}
BENCHMARK(BM_CompressionCache)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_BuildAdaptive(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const CompressionCache cache(kernel(n), ClusterTree(n, depth_for_min_leaf(n, 16)));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_adaptive(cache, 1e-8, formats::fp64(), formats::all_named()).leaves.size());
}
BENCHMARK(BM_BuildAdaptive)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mode = state.range(1) ? ArithMode::full_arithmetic : ArithMode::storage_only;
  const auto h = build_adaptive(kernel(n), ClusterTree(n, depth_for_min_leaf(n, 16)), 1e-8, formats::fp32(),
                                formats::all_named());
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  for (auto _ : state) benchmark::DoNotOptimize(matvec(h, x, formats::fp32(), mode).data());
  state.SetLabel(std::string(to_string(mode)));
}
BENCHMARK(BM_Matvec)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Lu(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Eigen::MatrixXd a = diagonally_dominant_matrix(n, 3);
  const auto h = build_adaptive(a, ClusterTree(n, depth_for_min_leaf(n, 16)), 1e-8, formats::fp64(),
                                formats::all_named());
  for (auto _ : state) benchmark::DoNotOptimize(lu(h, 1e-8, formats::fp64()).L.leaves.size());
}
BENCHMARK(BM_Lu)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
