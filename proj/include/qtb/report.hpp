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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtb/engine.hpp"

namespace qtb {

/// Per-N summary of a campaign for one method.
struct PercentileCurve {
  std::vector<double> n;
  std::vector<double> infidelity95;
  std::vector<double> bases95;
  std::vector<double> t_protocol95;
  std::vector<double> t_estimator95;
  std::vector<double> mean_infidelity;
  std::vector<double> efficiency;
  std::vector<double> outlier_ratio;
  std::vector<int> runs;
};

/// One row of the benchmark table. Rows obtained by extrapolation carry only N_B;
/// N_B is NaN when the curve cannot be interpolated.
struct BenchmarkReport {
  std::string method;
  double n_b = 0.0;
  std::optional<double> bases95;
  std::optional<double> t_protocol95;
  std::optional<double> t_estimator95;
  std::optional<double> efficiency;
  std::optional<double> outlier_ratio;
  bool factorized = false;
  bool extrapolated = false;
};

/// Failed runs are skipped. `rank` is the structural rank used for efficiencies.
PercentileCurve percentile_curve(std::span<const RunResult> runs, int d, int rank, double q = 0.95);

BenchmarkReport compile_report(const std::string& method, std::span<const RunResult> runs, double fidelity_target,
                               int d, int rank, bool factorized, double q = 0.95);

/// The "Lower bound" row: N_B of an optimal estimator, efficiency 1.
BenchmarkReport lower_bound_report(double fidelity_target, int d, int rank);

/// Runs whose infidelity is drawn as d0 * chi^2_nu, the optimal-estimator law.
std::vector<RunResult> synthetic_optimal_runs(int d, int rank, std::span<const std::int64_t> n_grid, int runs,
                                              std::uint64_t seed);

}  // namespace qtb
