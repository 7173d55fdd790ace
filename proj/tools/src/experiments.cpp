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
#include "experiments.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hodlrmp/hodlr.hpp"
#include "hodlrmp/linops.hpp"
#include "hodlrmp/metrics.hpp"
#include "hodlrmp/problems.hpp"
#include "sources.hpp"

namespace hodlrmp::cli {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <typename T, typename F>
std::string joined(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ';';
    out += fmt(items[i]);
  }
  return out;
}

std::string plan_formats(const PrecisionPlan& p) {
  return joined(p.levels, [](const LevelPrecision& l) { return l.chosen.name; });
}
std::string plan_xi(const PrecisionPlan& p) {
  return joined(p.levels, [](const LevelPrecision& l) { return num(l.xi); });
}
std::string plan_thresholds(const PrecisionPlan& p) {
  return joined(p.levels, [](const LevelPrecision& l) { return num(l.threshold); });
}

// CSV fields here never contain commas or quotes except the matrix id,
// which may hold a path.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void header(std::ostream& csv, const char* command, const ExperimentOptions& opt, const char* columns) {
  csv << "# hodlr-mp " << command << " schema=" << kCsvSchemaVersion << " generator=splitmix64 seed=" << opt.seed
      << " mode=" << to_string(opt.mode) << '\n'
      << columns << '\n';
}

struct Loaded {
  MatrixSource src;
  Eigen::MatrixXd a;
};

Loaded load(const std::string& text) {
  Loaded l{parse_source(text), {}};
  l.a = load_source(l.src);
  if (l.a.rows() != l.a.cols()) throw std::invalid_argument("source '" + text + "' is not square");
  return l;
}

ClusterTree tree_for(const Loaded& l, int depth) {
  const auto n = static_cast<std::size_t>(l.a.rows());
  if (depth < 0 || (std::size_t{1} << depth) > n)
    throw std::invalid_argument("depth " + std::to_string(depth) + " is invalid for '" + l.src.text + "' (n = " +
                                std::to_string(n) + ")");
  return build_tree(n, depth);
}

std::vector<PrecisionFormat> uniform_levels(int depth) {
  return std::vector<PrecisionFormat>(static_cast<std::size_t>(depth), formats::fp64());
}

}  // namespace

RunStatus run_construct(const ExperimentOptions& opt, std::ostream& csv) {
  RunStatus status;
  const std::size_t cells = opt.sources.size() * opt.depths.size() * opt.eps.size() * opt.workings.size();
  if (!opt.save_path.empty() && cells != 1)
    throw std::invalid_argument("--save needs exactly one (source, depth, eps, working) cell");
  header(csv, "construct", opt,
         "matrix,n,depth,eps,working,variant,formats,xi,threshold,certified,error,bound,storage_bits,max_rank,"
         "verdict");
  for (const auto& text : opt.sources) {
    const Loaded l = load(text);
    const double norm_a = l.a.norm();
    for (int depth : opt.depths) {
      const CompressionCache cache(l.a, tree_for(l, depth));
      for (double eps : opt.eps)
        for (const auto& working : opt.workings) {
          const HodlrMatrix uni = build_uniform(cache, eps, uniform_levels(depth), working);
          const HodlrMatrix ada = build_adaptive(cache, eps, working, opt.formats);
          for (const HodlrMatrix* h : {&uni, &ada}) {
            const bool adaptive = h == &ada;
            const double err = norm_a == 0.0 ? 0.0 : (l.a - reconstruct_dense(*h)).norm() / norm_a;
            const double bound = depth == 0 ? eps : construction_bound(depth, eps);
            const bool certified = h->plan.certified();
            std::string verdict = err <= bound ? "ok" : "violated";
            if (!certified) verdict = "not-certified";
            if (verdict == "violated") status.violation = true;
            csv << field(l.src.text) << ',' << l.a.rows() << ',' << depth << ',' << num(eps) << ',' << working.name
                << ',' << (adaptive ? "adaptive" : "uniform-fp64") << ',' << plan_formats(h->plan) << ','
                << plan_xi(h->plan) << ',' << plan_thresholds(h->plan) << ',' << (certified ? 1 : 0) << ','
                << num(err) << ',' << num(bound) << ',' << storage_bits(*h) << ',' << max_rank(*h) << ','
                << verdict << '\n';
          }
          if (!opt.save_path.empty()) save_hodlr(ada, opt.save_path);
        }
    }
  }
  return status;
}

RunStatus run_matvec(const ExperimentOptions& opt, std::ostream& csv) {
  if (opt.trials < 1) throw std::invalid_argument("--trials must be at least 1");
  RunStatus status;
  header(csv, "matvec", opt,
         "matrix,n,depth,eps,working,trials,formats,certified,error_mean,error_max,bound,hypothesis,verdict");
  for (const auto& text : opt.sources) {
    const Loaded l = load(text);
    const auto n = static_cast<std::size_t>(l.a.rows());
    for (int depth : opt.depths) {
      if (depth < 1) throw std::invalid_argument("matvec needs depth >= 1");
      const CompressionCache cache(l.a, tree_for(l, depth));
      for (double eps : opt.eps)
        for (const auto& working : opt.workings) {
          const HodlrMatrix h = build_adaptive(cache, eps, working, opt.formats);
          // the same vectors for every cell
          SplitMix64 rng(opt.seed);
          double sum = 0.0, worst = 0.0;
          for (int t = 0; t < opt.trials; ++t) {
            const Eigen::VectorXd x = random_vector(n, rng);
            const double e = matvec_backward_error(l.a, x, matvec(h, x, working, opt.mode));
            sum += e;
            worst = std::max(worst, e);
          }
          const double mean = sum / opt.trials;
          const double bound = matvec_bound(depth, eps);
          const bool hyp = precision_hypothesis(working, eps, n);
          const ErrorReport r = make_report(mean, bound, hyp);
          if (hyp && !r.satisfied) status.violation = true;
          csv << field(l.src.text) << ',' << n << ',' << depth << ',' << num(eps) << ',' << working.name << ','
              << opt.trials << ',' << plan_formats(h.plan) << ',' << (h.plan.certified() ? 1 : 0) << ','
              << num(mean) << ',' << num(worst) << ',' << num(bound) << ',' << (hyp ? 1 : 0) << ','
              << r.verdict() << '\n';
        }
    }
  }
  return status;
}

RunStatus run_lu(const ExperimentOptions& opt, std::ostream& csv) {
  RunStatus status;
  header(csv, "lu", opt,
         "matrix,n,depth,eps,working,status,formats,error,bound,norm_a,norm_l,norm_u,hypothesis,verdict");
  for (const auto& text : opt.sources) {
    const Loaded l = load(text);
    const auto n = static_cast<std::size_t>(l.a.rows());
    const double norm_a = l.a.norm();
    for (int depth : opt.depths) {
      if (depth < 1) throw std::invalid_argument("lu needs depth >= 1");
      const CompressionCache cache(l.a, tree_for(l, depth));
      for (double eps : opt.eps)
        for (const auto& working : opt.workings) {
          const HodlrMatrix h = build_adaptive(cache, eps, working, opt.formats);
          const bool hyp = precision_hypothesis(working, eps, n);
          csv << field(l.src.text) << ',' << n << ',' << depth << ',' << num(eps) << ',' << working.name << ',';
          try {
            LuOptions lo;
            lo.mode = opt.mode;
            const auto f = lu(h, eps, working, lo);
            const auto [lm, um] = reconstruct_lu(f);
            const double err = lu_backward_error(l.a, lm, um);
            const double bound = lu_bound(depth, eps, norm_a, lm.norm(), um.norm());
            const ErrorReport r = make_report(err, bound, hyp);
            if (hyp && !r.satisfied) status.violation = true;
            csv << "ok," << plan_formats(h.plan) << ',' << num(err) << ',' << num(bound) << ',' << num(norm_a) << ','
                << num(lm.norm()) << ',' << num(um.norm()) << ',' << (hyp ? 1 : 0) << ',' << r.verdict() << '\n';
          } catch (const PivotBreakdown&) {
            status.breakdown = true;
            csv << "pivot-breakdown," << plan_formats(h.plan) << ",nan,nan," << num(norm_a) << ",nan,nan,"
                << (hyp ? 1 : 0) << ",pivot-breakdown\n";
          }
        }
    }
  }
  return status;
}

RunStatus run_storage(const ExperimentOptions& opt, std::ostream& csv) {
  header(csv, "storage", opt, "matrix,n,depth,eps,working,formats,certified,bits_uniform,bits_adaptive,ratio");
  for (const auto& text : opt.sources) {
    const Loaded l = load(text);
    for (int depth : opt.depths) {
      const CompressionCache cache(l.a, tree_for(l, depth));
      for (double eps : opt.eps)
        for (const auto& working : opt.workings) {
          const HodlrMatrix uni = build_uniform(cache, eps, uniform_levels(depth), working);
          const HodlrMatrix ada = build_adaptive(cache, eps, working, opt.formats);
          csv << field(l.src.text) << ',' << l.a.rows() << ',' << depth << ',' << num(eps) << ',' << working.name
              << ',' << plan_formats(ada.plan) << ',' << (ada.plan.certified() ? 1 : 0) << ',' << storage_bits(uni)
              << ',' << storage_bits(ada) << ',' << num(storage_ratio(uni, ada)) << '\n';
        }
    }
  }
  return {};
}

}  // namespace hodlrmp::cli
