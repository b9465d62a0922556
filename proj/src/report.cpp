// Copyright 2026 The qtbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtb/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "qtb/stats.hpp"

namespace qtb {

PercentileCurve percentile_curve(std::span<const RunResult> runs, int d, int rank, double q) {
  std::map<std::int64_t, std::vector<const RunResult*>> by_n;
  for (const RunResult& r : runs)
    if (!r.failed) by_n[r.n_total].push_back(&r);

  PercentileCurve curve;
  for (const auto& [n, group] : by_n) {
    if (group.size() < 2) throw Error("every sample size needs at least two successful runs");
    std::vector<double> infid, bases, tp, te;
    for (const RunResult* r : group) {
      infid.push_back(std::max(0.0, 1.0 - r->fidelity));
      bases.push_back(static_cast<double>(r->bases_count));
      tp.push_back(r->t_protocol);
      te.push_back(r->t_estimator);
    }
    const double mean = std::accumulate(infid.begin(), infid.end(), 0.0) / static_cast<double>(infid.size());
    curve.n.push_back(static_cast<double>(n));
    curve.infidelity95.push_back(percentile(infid, q));
    curve.bases95.push_back(percentile(bases, q));
    curve.t_protocol95.push_back(percentile(tp, q));
    curve.t_estimator95.push_back(percentile(te, q));
    curve.mean_infidelity.push_back(mean);
    curve.efficiency.push_back(mean > 0.0 ? efficiency(mean, static_cast<double>(n), d, rank)
                                          : std::numeric_limits<double>::infinity());
    curve.outlier_ratio.push_back(infid.size() >= 4 ? outlier_ratio(infid) : 0.0);
    curve.runs.push_back(static_cast<int>(group.size()));
  }
  if (curve.n.size() < 2) throw Error("a report needs at least two sample sizes");
  return curve;
}

BenchmarkReport compile_report(const std::string& method, std::span<const RunResult> runs, double fidelity_target,
                               int d, int rank, bool factorized, double q) {
  const PercentileCurve curve = percentile_curve(runs, d, rank, q);
  const InterpolatedN found = interpolate_NB(curve.n, curve.infidelity95, 1.0 - fidelity_target);
  BenchmarkReport report;
  report.method = method;
  report.n_b = found.n_b;
  report.extrapolated = found.extrapolated;
  report.factorized = factorized;
  if (!found.extrapolated) {
    report.bases95 = interpolate_at_NB(curve.n, curve.bases95, found.n_b);
    report.t_protocol95 = interpolate_at_NB(curve.n, curve.t_protocol95, found.n_b);
    report.t_estimator95 = interpolate_at_NB(curve.n, curve.t_estimator95, found.n_b);
    report.efficiency = interpolate_at_NB(curve.n, curve.efficiency, found.n_b);
    report.outlier_ratio = interpolate_at_NB(curve.n, curve.outlier_ratio, found.n_b);
  }
  return report;
}

BenchmarkReport lower_bound_report(double fidelity_target, int d, int rank) {
  BenchmarkReport report;
  report.method = "lower_bound";
  report.n_b = lower_bound_NB(fidelity_target, d, rank);
  report.efficiency = 1.0;
  return report;
}

std::vector<RunResult> synthetic_optimal_runs(int d, int rank, std::span<const std::int64_t> n_grid, int runs,
                                              std::uint64_t seed) {
  const int dof = nu(d, rank);
  std::vector<RunResult> out;
  for (std::int64_t n : n_grid) {
    const double d0 = optimal_parameter_variance(static_cast<double>(n), d, rank);
    for (int i = 0; i < runs; ++i) {
      RunResult r;
      r.n_total = n;
      r.run_index = i;
      r.seed = run_seed(seed, TestKind::kRps, n, i);
      Rng rng(r.seed);
      std::normal_distribution<double> normal;
      double chi2 = 0.0;
      for (int k = 0; k < dof; ++k) {
        const double xi = normal(rng);
        chi2 += xi * xi;
      }
      r.fidelity = 1.0 - d0 * chi2;
      r.bases_count = 1;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace qtb
