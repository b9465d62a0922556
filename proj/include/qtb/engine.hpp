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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qtb/methods.hpp"
#include "qtb/states.hpp"

namespace qtb {

struct CampaignConfig {
  Dims dims;
  TestKind test = TestKind::kRps;
  MethodSpec method;
  std::vector<std::int64_t> n_grid;
  int runs_per_n = 1000;
  std::uint64_t seed = 0;
  double fidelity_target = 0.999;
  SgqtParams sgqt;
  int workers = 1;
};

/// Throws Error describing the first problem found.
void validate(const CampaignConfig& config);

/// Powers of ten bracketing where typical methods reach the default target.
std::vector<std::int64_t> default_grid(TestKind test, const Dims& dims);

struct RunResult {
  std::int64_t n_total = 0;
  int run_index = 0;
  std::uint64_t seed = 0;
  double fidelity = 0.0;
  std::int64_t bases_count = 0;
  double t_protocol = 0.0;   // seconds
  double t_estimator = 0.0;  // seconds
  bool failed = false;
  std::string error;  // diagnostics of failed runs; not persisted
};

/// Born rule p_k = Tr(rho P_k); tiny negative roundoff clamped, then renormalized.
RealVector born_probabilities(const DensityMatrix& rho, const Povm& povm);

/// Multinomial draw of `shots` outcomes.
std::vector<std::int64_t> sample_counts(const RealVector& probs, std::int64_t shots, Rng& rng);

/// Seed of run `run_index` at sample size N; independent of the method so that
/// methods are compared on identical states.
std::uint64_t run_seed(std::uint64_t base, TestKind test, std::int64_t n_total, int run_index);

/// One tomography experiment with N copies. Errors from handlers are reported as a failed run.
/// `records`, when given, receives every executed measurement.
RunResult run_experiment(const CampaignConfig& config, std::int64_t n_total, int run_index,
                         std::vector<MeasurementRecord>* records = nullptr);

/// Every (N, run) pair, ordered by grid position then run index. `on_result`
/// is called in that same order, from one thread at a time.
std::vector<RunResult> run_campaign(const CampaignConfig& config,
                                    const std::function<void(const RunResult&)>& on_result = {});

/// More than 1% of the runs failed.
bool campaign_failed(const std::vector<RunResult>& results);

}  // namespace qtb
