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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hodlrmp/fpsim.hpp"

namespace hodlrmp::cli {

constexpr int kCsvSchemaVersion = 1;

struct ExperimentOptions {
  std::vector<std::string> sources;
  std::vector<int> depths;
  std::vector<double> eps;
  std::vector<PrecisionFormat> workings;
  std::vector<PrecisionFormat> formats;  // candidate storage formats
  int trials = 10;
  std::uint64_t seed = 0;
  ArithMode mode = ArithMode::full_arithmetic;
  std::string save_path;  // construct only: write the adaptive build here
};

/// What a run found; maps onto the process exit code.
struct RunStatus {
  bool violation = false;  // a bound failed while its hypothesis held
  bool breakdown = false;  // some cell hit a pivot breakdown
};

RunStatus run_construct(const ExperimentOptions& opt, std::ostream& csv);
RunStatus run_matvec(const ExperimentOptions& opt, std::ostream& csv);
RunStatus run_lu(const ExperimentOptions& opt, std::ostream& csv);
RunStatus run_storage(const ExperimentOptions& opt, std::ostream& csv);

}  // namespace hodlrmp::cli
