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

#include "qtb/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

namespace qtb {

void validate(const CampaignConfig& config) {
  total_dim(config.dims);
  check_compatible(config.method, config.dims);
  if (config.n_grid.empty()) throw Error("the N grid is empty");
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    if (config.n_grid[i] < 1) throw Error("sample sizes must be positive");
    if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1]) throw Error("the N grid must be strictly increasing");
  }
  if (config.runs_per_n < 2) throw Error("runs per N must be at least 2");
  if (!(config.fidelity_target > 0.0 && config.fidelity_target < 1.0)) throw Error("F_B must lie in (0, 1)");
  if (config.workers < 1) throw Error("worker count must be positive");
  if (config.test == TestKind::kRnp) noisy_register(config.dims, 0.0);
  if (config.method.protocol == "sgqt") validate(config.sgqt);
}

std::vector<std::int64_t> default_grid(TestKind, const Dims& dims) {
  if (total_dim(dims) <= 4) return {100, 1000, 10000, 100000, 1000000};
  return {1000, 10000, 100000, 1000000, 10000000};
}

RealVector born_probabilities(const DensityMatrix& rho, const Povm& povm) {
  if (povm.dim() != rho.dim()) throw Error("born_probabilities: dimension mismatch");
  RealVector p(static_cast<Eigen::Index>(povm.size()));
  for (std::size_t k = 0; k < povm.size(); ++k) {
    // Tr(rho P) for Hermitian P.
    p(static_cast<Eigen::Index>(k)) = (rho.matrix.cwiseProduct(povm.elements[k].conjugate())).sum().real();
  }
  if (p.minCoeff() < -tol::kBornNegative) throw Error("born_probabilities: negative probability");
  p = p.cwiseMax(0.0);
  const double sum = p.sum();
  if (std::abs(sum - 1.0) > tol::kBornSum) throw Error("born_probabilities: probabilities do not sum to one");
  return p / sum;
}

std::vector<std::int64_t> sample_counts(const RealVector& probs, std::int64_t shots, Rng& rng) {
  if (shots < 0) throw Error("sample_counts: negative shot count");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(probs.size()), 0);
  std::int64_t remaining = shots;
  double mass = 1.0;
  for (Eigen::Index k = 0; k < probs.size() && remaining > 0; ++k) {
    if (k + 1 == probs.size()) {
      counts[k] = remaining;
      break;
    }
    const double q = mass > 0.0 ? std::clamp(probs(k) / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> binomial(remaining, q);
    counts[k] = binomial(rng);
    remaining -= counts[k];
    mass -= probs(k);
  }
  return counts;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t { kState = 1, kSampling = 2, kMethod = 3 };

Rng stream(std::uint64_t seed, Stream s) { return Rng(splitmix64(seed ^ (static_cast<std::uint64_t>(s) << 56))); }

bool same_povm(const Povm& a, const Povm& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if ((a.elements[k] - b.elements[k]).cwiseAbs().maxCoeff() > 1e-12) return false;
  return true;
}

// Equal POVMs have signatures within a few 1e-12, so only neighbours in
// signature order need an element-wise comparison.
double povm_signature(const Povm& p) {
  double s = static_cast<double>(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const ComplexMatrix& e = p.elements[k];
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      for (Eigen::Index i = 0; i < e.rows(); ++i) {
        const double w = 1.0 + 0.37 * static_cast<double>(i) + 0.61 * static_cast<double>(j) + 0.13 * static_cast<double>(k);
        s += w * (e(i, j).real() + 0.5 * e(i, j).imag());
      }
  }
  return s;
}

std::int64_t count_distinct_povms(const std::vector<MeasurementRecord>& records) {
  std::vector<std::pair<double, const Povm*>> keyed;
  keyed.reserve(records.size());
  double slack = 0.0;
  for (const MeasurementRecord& r : records) {
    keyed.emplace_back(povm_signature(r.spec.povm), &r.spec.povm);
    const double n = static_cast<double>(r.spec.povm.size() * r.spec.povm.dim() * r.spec.povm.dim());
    slack = std::max(slack, 4.0 * n * 1e-12 * (1.0 + r.spec.povm.size() + r.spec.povm.dim()));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::size_t> kept;
  std::int64_t distinct = 0;
  std::size_t window = 0;  // first kept index still within slack of the current key
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    while (window < kept.size() && keyed[kept[window]].first < keyed[i].first - slack) ++window;
    bool seen = false;
    for (std::size_t w = window; w < kept.size() && !seen; ++w) seen = same_povm(*keyed[kept[w]].second, *keyed[i].second);
    if (!seen) {
      kept.push_back(i);
      ++distinct;
    }
  }
  return distinct;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::uint64_t run_seed(std::uint64_t base, TestKind test, std::int64_t n_total, int run_index) {
  std::uint64_t s = splitmix64(base);
  s = splitmix64(s ^ static_cast<std::uint64_t>(test));
  s = splitmix64(s ^ static_cast<std::uint64_t>(n_total));
  return splitmix64(s ^ static_cast<std::uint64_t>(run_index));
}

RunResult run_experiment(const CampaignConfig& config, std::int64_t n_total, int run_index,
                         std::vector<MeasurementRecord>* records_out) {
  RunResult result;
  result.n_total = n_total;
  result.run_index = run_index;
  result.seed = run_seed(config.seed, config.test, n_total, run_index);
  try {
    Rng state_rng = stream(result.seed, Stream::kState);
    Rng sampling_rng = stream(result.seed, Stream::kSampling);
    const DensityMatrix rho = generate_state(config.test, config.dims, state_rng);

    MethodInstance method = instantiate(config.method, config.dims, config.sgqt, stream(result.seed, Stream::kMethod));
    std::vector<MeasurementRecord> records;
    std::int64_t measured = 0;
    for (;;) {
      const auto start = std::chrono::steady_clock::now();
      std::vector<MeasurementSpec> batch = method.protocol->next(ProtocolRequest{measured, n_total, records});
      result.t_protocol += seconds_since(start);
      if (batch.empty()) break;
      std::int64_t batch_shots = 0;
      for (const MeasurementSpec& spec : batch) {
        if (spec.shots < 1) throw Error("protocol issued a measurement with no shots");
        batch_shots += spec.shots;
      }
      if (batch_shots > n_total - measured) throw Error("protocol exceeded the sample budget");
      for (MeasurementSpec& spec : batch) {
        const RealVector probs = born_probabilities(rho, spec.povm);
        std::vector<std::int64_t> counts = sample_counts(probs, spec.shots, sampling_rng);
        measured += spec.shots;
        records.push_back(MeasurementRecord{std::move(spec), std::move(counts)});
      }
    }
    if (records.empty()) throw Error("protocol issued no measurements");
    result.bases_count = count_distinct_povms(records);

    const auto start = std::chrono::steady_clock::now();
    const EstimatorReport report = method.estimator(records, config.dims);
    result.t_estimator = seconds_since(start);
    result.fidelity = fidelity(rho, report.estimate);
    if (records_out) *records_out = std::move(records);
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
    result.fidelity = 0.0;
  }
  return result;
}

std::vector<RunResult> run_campaign(const CampaignConfig& config,
                                    const std::function<void(const RunResult&)>& on_result) {
  validate(config);
  const std::size_t runs = static_cast<std::size_t>(config.runs_per_n);
  const std::size_t total = config.n_grid.size() * runs;
  std::vector<RunResult> results(total);
  std::vector<char> done(total, 0);
  std::atomic<std::size_t> next_item{0};
  std::mutex emit_mutex;
  std::size_t next_emit = 0;

  auto worker = [&] {
    for (;;) {
      const std::size_t item = next_item.fetch_add(1);
      if (item >= total) return;
      RunResult r = run_experiment(config, config.n_grid[item / runs], static_cast<int>(item % runs));
      std::lock_guard lock(emit_mutex);
      results[item] = std::move(r);
      done[item] = 1;
      while (next_emit < total && done[next_emit]) {
        if (on_result) on_result(results[next_emit]);
        ++next_emit;
      }
    }
  };

  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  return results;
}

bool campaign_failed(const std::vector<RunResult>& results) {
  const auto failures = std::count_if(results.begin(), results.end(), [](const RunResult& r) { return r.failed; });
  return static_cast<double>(failures) > 0.01 * static_cast<double>(results.size());
}

}  // namespace qtb
