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

#include <doctest.h>

#include <numeric>
#include <type_traits>

#include "helpers.hpp"
#include "qtb/engine.hpp"

using namespace qtb;
using namespace qtb::testing;

// Handlers see copy counts and past records only; estimators see records only.
static_assert(std::is_same_v<decltype(ProtocolRequest::measured), std::int64_t>);
static_assert(std::is_same_v<decltype(ProtocolRequest::budget), std::int64_t>);
static_assert(std::is_same_v<decltype(ProtocolRequest::records), std::span<const MeasurementRecord>>);
static_assert(sizeof(ProtocolRequest) == 2 * sizeof(std::int64_t) + sizeof(std::span<const MeasurementRecord>));
static_assert(std::is_same_v<Estimator, std::function<EstimatorReport(std::span<const MeasurementRecord>, const Dims&)>>);

namespace {

CampaignConfig config_for(const std::string& method, Dims dims = {2, 2}, TestKind test = TestKind::kRps) {
  CampaignConfig c;
  c.dims = std::move(dims);
  c.test = test;
  c.method = parse_method(method);
  c.n_grid = {100, 1000};
  c.runs_per_n = 5;
  c.seed = 7;
  return c;
}

bool same_outcome(const RunResult& a, const RunResult& b) {
  return a.n_total == b.n_total && a.run_index == b.run_index && a.seed == b.seed && a.fidelity == b.fidelity &&
         a.bases_count == b.bases_count && a.failed == b.failed;
}

}  // namespace

TEST_CASE("born probabilities") {
  Rng rng(51);
  const ComplexMatrix basis = haar_unitary(3, rng);
  const Povm povm = projective_povm(basis);
  const RealVector u = born_probabilities(DensityMatrix{{3}, ComplexMatrix::Identity(3, 3) / 3.0}, povm);
  for (int k = 0; k < 3; ++k) CHECK(u(k) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  ComplexMatrix zero = ComplexMatrix::Zero(3, 3);
  zero(0, 0) = 1;
  const RealVector z = born_probabilities(DensityMatrix{{3}, zero}, projective_povm(ComplexMatrix::Identity(3, 3)));
  CHECK(z(0) == 1.0);
  CHECK(z(1) == 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix rho = random_density(3, rng);
    const Povm p = projective_povm(haar_unitary(3, rng));
    const RealVector got = born_probabilities(DensityMatrix{{3}, rho}, p);
    for (int k = 0; k < 3; ++k) {
      cd direct = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) direct += rho(i, j) * p.elements[k](j, i);
      CHECK(std::abs(got(k) - direct.real()) < 1e-12);
    }
  }
  CHECK_THROWS_AS(born_probabilities(DensityMatrix{{2}, ComplexMatrix::Identity(2, 2) / 2.0}, povm), Error);
}

TEST_CASE("multinomial sampling") {
  Rng rng(52);
  RealVector p(2);
  p << 0.5, 0.5;
  CHECK(sample_counts(p, 0, rng) == std::vector<std::int64_t>{0, 0});
  RealVector det(2);
  det << 1.0, 0.0;
  CHECK(sample_counts(det, 1234, rng) == std::vector<std::int64_t>{1234, 0});
  const auto big = sample_counts(p, 1000000, rng);
  CHECK(std::abs(big[0] - 500000) <= 1500);
  RealVector q(5);
  q << 0.1, 0.2, 0.3, 0.15, 0.25;
  for (int i = 0; i < 50; ++i) {
    const auto c = sample_counts(q, 777, rng);
    CHECK(std::accumulate(c.begin(), c.end(), std::int64_t{0}) == 777);
  }
}

TEST_CASE("configuration checks") {
  CampaignConfig c = config_for("fmub+trml:1");
  CHECK_NOTHROW(validate(c));
  c.n_grid = {1000, 100};
  CHECK_THROWS_AS(validate(c), Error);
  c = config_for("fmub+trml:1");
  c.runs_per_n = 1;
  CHECK_THROWS_AS(validate(c), Error);
  c = config_for("fmub+trml:5");
  CHECK_THROWS_AS(validate(c), Error);
  c = config_for("fo+frml", {4});
  CHECK_THROWS_AS(validate(c), Error);
  c = config_for("mub+frml", {2, 3});
  CHECK_THROWS_AS(validate(c), Error);
  c = config_for("fmub+frml", {3});
  c.test = TestKind::kRnp;
  CHECK_THROWS_AS(validate(c), Error);
  CHECK(default_grid(TestKind::kRps, {2, 2}).front() == 100);
  CHECK(default_grid(TestKind::kRps, {2, 2, 2}).back() == 10000000);
}

TEST_CASE("single experiments") {
  const CampaignConfig c = config_for("fmub+trml:1");
  std::vector<MeasurementRecord> records;
  const RunResult a = run_experiment(c, 1000, 3, &records);
  const RunResult b = run_experiment(c, 1000, 3);
  CHECK_FALSE(a.failed);
  CHECK(same_outcome(a, b));
  CHECK(a.bases_count == 9);
  CHECK(a.fidelity >= 0.0);
  CHECK(a.fidelity <= 1.0);
  CHECK(a.t_protocol >= 0.0);
  CHECK(a.t_estimator >= 0.0);
  std::int64_t shots = 0;
  for (const auto& r : records) shots += r.spec.shots;
  CHECK(shots == 1000);
  CHECK(run_experiment(c, 1000, 4).seed != a.seed);
  CHECK(run_experiment(config_for("fmub+frml"), 1000, 3).seed == a.seed);
}

TEST_CASE("budget conservation") {
  for (const char* method : {"fmub+ppi", "mub+frml", "pauli+frls", "amub+frml", "fo+trml:1", "fomub+frml"}) {
    CAPTURE(method);
    const CampaignConfig c = config_for(method);
    for (std::int64_t n : {321, 4000}) {
      std::vector<MeasurementRecord> records;
      const RunResult r = run_experiment(c, n, 0, &records);
      REQUIRE_FALSE(r.failed);
      std::int64_t shots = 0;
      for (const auto& rec : records) {
        shots += rec.spec.shots;
        CHECK(std::accumulate(rec.counts.begin(), rec.counts.end(), std::int64_t{0}) == rec.spec.shots);
      }
      CHECK(shots == n);
    }
  }
  // The self-guided method consumes whole iterations only.
  std::vector<MeasurementRecord> records;
  const RunResult s = run_experiment(config_for("sgqt"), 1050, 0, &records);
  std::int64_t shots = 0;
  for (const auto& rec : records) shots += rec.spec.shots;
  CHECK(shots == 1000);
  CHECK(s.bases_count == 10);
}

TEST_CASE("failed runs") {
  CampaignConfig c = config_for("sgqt");
  const RunResult r = run_experiment(c, 100, 0);
  CHECK(r.failed);
  CHECK(r.error.find("budget") != std::string::npos);
  c.n_grid = {100, 1000};
  const auto results = run_campaign(c);
  CHECK(campaign_failed(results));
  c.n_grid = {1000, 2000};
  CHECK_FALSE(campaign_failed(run_campaign(c)));
}

TEST_CASE("campaigns") {
  CampaignConfig c = config_for("fmub+trml:1");
  std::vector<std::pair<std::int64_t, int>> order;
  const auto results = run_campaign(c, [&](const RunResult& r) { order.emplace_back(r.n_total, r.run_index); });
  REQUIRE(results.size() == 10);
  REQUIRE(order.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(order[i].first == c.n_grid[i / 5]);
    CHECK(order[i].second == static_cast<int>(i % 5));
  }
  const auto again = run_campaign(c);
  c.workers = 3;
  const auto parallel = run_campaign(c);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(same_outcome(results[i], again[i]));
    CHECK(same_outcome(results[i], parallel[i]));
  }
  CampaignConfig adaptive = config_for("amub+frml");
  adaptive.workers = 2;
  const auto a1 = run_campaign(adaptive);
  adaptive.workers = 1;
  const auto a2 = run_campaign(adaptive);
  for (std::size_t i = 0; i < a1.size(); ++i) CHECK(same_outcome(a1[i], a2[i]));
}

TEST_CASE("full-rank maximum likelihood reaches the benchmark at a million copies") {
  CampaignConfig c = config_for("fmub+frml");
  int reached = 0;
  for (int run = 0; run < 100; ++run)
    if (run_experiment(c, 1000000, run).fidelity >= 0.999) ++reached;
  CHECK(reached >= 80);
}
