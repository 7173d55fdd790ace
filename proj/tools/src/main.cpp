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
// hodlr-mp: experiment harness for mixed-precision HODLR matrices.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "experiments.hpp"
#include "hodlrmp/linops.hpp"
#include "sources.hpp"

namespace {

using hodlrmp::cli::ExperimentOptions;
using hodlrmp::cli::RunStatus;

enum Exit { kOk = 0, kUsage = 1, kBreakdown = 2, kViolation = 3 };

struct RawFlags {
  std::vector<std::string> sources;
  std::vector<int> depths;
  std::vector<double> eps;
  std::vector<std::string> workings;
  std::string formats = "q52,bf16,fp16,fp32,fp64";
  int trials = 10;
  std::uint64_t seed = 0;
  std::string mode = "full-arithmetic";
  std::string out;
  std::string save;
};

std::vector<double> decade_grid() {
  std::vector<double> g;
  for (int e = -1; e >= -10; --e) g.push_back(std::pow(10.0, e));
  return g;
}

struct Defaults {
  std::vector<std::string> sources;
  std::vector<int> depths;
  std::vector<double> eps;
  std::vector<std::string> workings;
};

const std::vector<std::string> kKernels = {"mat-1", "mat-2", "mat-3", "mat-4"};

Defaults defaults_for(const std::string& cmd) {
  if (cmd == "construct") return {{}, {8}, {1e-4}, {"fp64"}};
  if (cmd == "matvec") return {kKernels, {8}, decade_grid(), {"fp64", "fp32", "bf16"}};
  if (cmd == "lu") return {{}, {2, 8}, decade_grid(), {"fp64", "fp32", "bf16"}};
  return {{}, {8}, {1e-1, 1e-7}, {"fp64"}};  // storage
}

ExperimentOptions resolve(const RawFlags& f, const std::string& cmd) {
  const Defaults d = defaults_for(cmd);
  ExperimentOptions o;
  o.sources = f.sources.empty() ? d.sources : f.sources;
  if (o.sources.empty()) throw CLI::ValidationError("--source", "at least one --source is required for " + cmd);
  // fail on bad descriptors and missing files before any output
  for (const auto& s : o.sources) {
    const auto src = hodlrmp::cli::parse_source(s);
    if (src.kind == hodlrmp::cli::MatrixSource::Kind::mtx) hodlrmp::cli::resolve_fixture(src.path);
  }
  o.depths = f.depths.empty() ? d.depths : f.depths;
  o.eps = f.eps.empty() ? d.eps : f.eps;
  for (double e : o.eps)
    if (!(e >= 0.0 && e < 1.0)) throw CLI::ValidationError("--eps", "tolerances must lie in [0, 1)");
  for (const auto& w : f.workings.empty() ? d.workings : f.workings) o.workings.push_back(hodlrmp::parse_format(w));
  o.formats = hodlrmp::parse_format_list(f.formats);
  o.trials = f.trials;
  o.seed = f.seed;
  o.mode = hodlrmp::parse_arith_mode(f.mode);
  o.save_path = f.save;
  return o;
}

int exit_code(const RunStatus& s) { return s.violation ? kViolation : kOk; }

RunStatus dispatch(const std::string& cmd, const ExperimentOptions& o, std::ostream& csv) {
  if (cmd == "construct") return hodlrmp::cli::run_construct(o, csv);
  if (cmd == "matvec") return hodlrmp::cli::run_matvec(o, csv);
  if (cmd == "lu") return hodlrmp::cli::run_lu(o, csv);
  return hodlrmp::cli::run_storage(o, csv);
}

int run(const std::string& cmd, const RawFlags& f) {
  if (cmd == "sweep") {
    if (f.out.empty()) throw CLI::ValidationError("--out", "sweep writes one CSV per experiment into --out <dir>");
    std::filesystem::create_directories(f.out);
    RunStatus all;
    for (const std::string sub : {"construct", "matvec", "lu", "storage"}) {
      RawFlags g = f;
      g.save.clear();
      if (g.sources.empty()) g.sources = kKernels;
      const std::string path = (std::filesystem::path(f.out) / (sub + ".csv")).string();
      std::ofstream csv(path);
      if (!csv) throw std::runtime_error("cannot write '" + path + "'");
      std::cerr << "hodlr-mp: " << sub << " -> " << path << '\n';
      const RunStatus s = dispatch(sub, resolve(g, sub), csv);
      all.violation |= s.violation;
      all.breakdown |= s.breakdown;
    }
    return exit_code(all);
  }
  const ExperimentOptions o = resolve(f, cmd);
  if (f.out.empty()) return exit_code(dispatch(cmd, o, std::cout));
  std::ofstream csv(f.out);
  if (!csv) throw std::runtime_error("cannot write '" + f.out + "'");
  return exit_code(dispatch(cmd, o, csv));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-precision HODLR experiments. Writes CSV to stdout or --out."};
  app.require_subcommand(1);
  RawFlags flags;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"construct", "uniform-fp64 and adaptive builds: per-level choices, construction error and bound"},
      {"matvec", "matvec backward error over an eps grid and working formats"},
      {"lu", "HODLR LU backward error over an eps grid and working formats"},
      {"storage", "storage ratio of uniform-fp64 to adaptive builds"},
      {"sweep", "run all four experiments, one CSV each in --out <dir>"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--source", flags.sources,
                    "matrix source (repeatable): kernel:<i|ii|iii>:<n>[:h=<v>], mat-1..mat-4, mtx:<path>[:schur], "
                    "random:<n>:<seed>, randdd:<n>:<seed>, identity:<n>");
    sub->add_option("--depth", flags.depths, "tree depth (repeatable)");
    sub->add_option("--eps", flags.eps, "truncation tolerance (repeatable)");
    sub->add_option("--working", flags.workings, "working format (repeatable)");
    sub->add_option("--formats", flags.formats, "candidate storage formats, comma separated")
        ->capture_default_str();
    sub->add_option("--trials", flags.trials, "random vectors per matvec cell")->capture_default_str();
    sub->add_option("--seed", flags.seed, "SplitMix64 seed for random vectors")->capture_default_str();
    sub->add_option("--mode", flags.mode, "storage-only or full-arithmetic")->capture_default_str();
    sub->add_option("--out", flags.out, "output CSV file (sweep: output directory)");
    if (name == "construct") sub->add_option("--save", flags.save, "write the adaptive build as a binary container");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return run(cmd, flags);
  } catch (const CLI::Error& e) {
    std::cerr << "hodlr-mp: " << e.what() << '\n';
    return kUsage;
  } catch (const hodlrmp::PivotBreakdown& e) {
    std::cerr << "hodlr-mp: " << e.what() << '\n';
    return kBreakdown;
  } catch (const std::domain_error& e) {
    std::cerr << "hodlr-mp: numerical breakdown: " << e.what() << '\n';
    return kBreakdown;
  } catch (const std::exception& e) {
    std::cerr << "hodlr-mp: " << e.what() << '\n';
    return kUsage;
  }
}
