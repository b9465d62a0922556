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

#include <algorithm>

#include "helpers.hpp"
#include "qtb/sgqt.hpp"

using namespace qtb;
using namespace qtb::testing;

namespace {

struct Trace {
  std::vector<MeasurementRecord> records;
  EstimatorReport final;
};

Trace drive(SgqtMethod& m, const ComplexMatrix& rho, std::int64_t budget, Rng& rng) {
  const DensityMatrix state{{static_cast<int>(rho.rows())}, rho};
  Trace t;
  std::int64_t measured = 0;
  for (;;) {
    auto batch = m.protocol->next(ProtocolRequest{measured, budget, t.records});
    if (batch.empty()) break;
    for (auto& s : batch) {
      auto counts = sample_counts(born_probabilities(state, s.povm), s.shots, rng);
      measured += s.shots;
      t.records.push_back(MeasurementRecord{std::move(s), std::move(counts)});
    }
  }
  t.final = m.estimator(t.records, state.dims);
  return t;
}

double overlap(const ComplexMatrix& rho, const ComplexVector& v) { return (v.adjoint() * rho * v)(0, 0).real(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("gain schedule and validation") {
  SgqtParams p;
  CHECK(p.A == 0.0);
  CHECK(p.a == 3.0);
  CHECK(p.b == 0.1);
  CHECK(p.s == 0.602);
  CHECK(p.t == 0.101);
  CHECK(p.shots_per_eval == 100);
  CHECK(p.alpha(0) == doctest::Approx(3.0));
  CHECK(p.beta(0) == doctest::Approx(0.1));
  CHECK(p.alpha(9) == doctest::Approx(3.0 / std::pow(10.0, 0.602)));
  CHECK(p.beta(9) == doctest::Approx(0.1 / std::pow(10.0, 0.101)));
  SgqtParams bad = p;
  bad.b = 0.0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = p;
  bad.shots_per_eval = 0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = p;
  bad.A = -1;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("zero gain keeps the initial guess") {
  Rng rng(41);
  SgqtParams p;
  p.a = 0.0;
  const ComplexVector init = haar_vector(4, rng);
  SgqtMethod m = sgqt_method({2, 2}, p, Rng(1), init);
  const Trace t = drive(m, random_density(4, rng, 1), 10000, rng);
  CHECK(overlap(t.final.estimate.matrix, init) >= 1 - 1e-12);
}

TEST_CASE("issued measurements and budget use") {
  Rng rng(42);
  SgqtMethod m = sgqt_method({2}, SgqtParams{}, Rng(2));
  const Trace t = drive(m, random_density(2, rng, 1), 1050, rng);
  CHECK(t.records.size() == 10);  // five iterations, 50 copies left over
  std::int64_t shots = 0;
  for (const auto& r : t.records) {
    CHECK(r.spec.kind == MeasurementKind::kOperator);
    REQUIRE(r.spec.povm.size() == 2);
    CHECK(max_abs(r.spec.povm.elements[0] + r.spec.povm.elements[1] - ComplexMatrix::Identity(2, 2)) <= 1e-10);
    CHECK_NOTHROW(check_povm(r.spec.povm));
    shots += r.spec.shots;
  }
  CHECK(shots == 1000);
  CHECK(t.final.iterations == 5);
  CHECK(std::abs(t.final.estimate.matrix.trace().real() - 1.0) < 1e-12);

  SgqtMethod small = sgqt_method({2}, SgqtParams{}, Rng(3));
  CHECK_THROWS_AS(small.protocol->next(ProtocolRequest{0, 199, {}}), Error);
}

TEST_CASE("perturbed probes stay close to the current guess") {
  // Perturbations have norm beta * sqrt(2d); for a qubit that is 2 beta, so the
  // normalized probes keep fidelity >= 1 - 4 beta^2 with the guess.
  Rng rng(43);
  const SgqtParams p;
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexVector init = haar_vector(2, rng);
    SgqtMethod m = sgqt_method({2}, p, Rng(100 + trial), init);
    const auto batch = m.protocol->next(ProtocolRequest{0, 200, {}});
    REQUIRE(batch.size() == 2);
    const ComplexMatrix guess = init * init.adjoint();
    for (const auto& s : batch) CHECK((guess * s.povm.elements[0]).trace().real() >= 1 - 4 * p.beta(0) * p.beta(0) - 1e-6);
  }

  // With a vanishing gain one step cannot leave that neighbourhood either.
  SgqtParams tiny = p;
  tiny.a = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexVector init = haar_vector(2, rng);
    SgqtMethod m = sgqt_method({2}, tiny, Rng(200 + trial), init);
    const Trace t = drive(m, init * init.adjoint(), 200, rng);
    CHECK(overlap(t.final.estimate.matrix, init) >= 1 - 4 * p.beta(0) * p.beta(0) - 1e-6);
  }
}

TEST_CASE("qubit convergence") {
  Rng rng(44);
  std::vector<double> fids;
  for (int run = 0; run < 100; ++run) {
    const ComplexMatrix truth = random_density(2, rng, 1);
    SgqtMethod m = sgqt_method({2}, SgqtParams{}, Rng(1000 + run));
    const Trace t = drive(m, truth, 100000, rng);
    fids.push_back(fidelity(DensityMatrix{{2}, truth}, t.final.estimate));
  }
  CHECK(median(fids) >= 0.99);
}

TEST_CASE("median fidelity improves along the run") {
  Rng rng(45);
  std::vector<double> at10, at100;
  for (int run = 0; run < 100; ++run) {
    const ComplexMatrix truth = random_density(4, rng, 1);
    SgqtMethod m10 = sgqt_method({2, 2}, SgqtParams{}, Rng(5000 + run));
    SgqtMethod m100 = sgqt_method({2, 2}, SgqtParams{}, Rng(5000 + run));
    Rng a(run), b(run);
    at10.push_back(fidelity(DensityMatrix{{4}, truth}, drive(m10, truth, 10 * 200, a).final.estimate));
    at100.push_back(fidelity(DensityMatrix{{4}, truth}, drive(m100, truth, 100 * 200, b).final.estimate));
  }
  CHECK(median(at100) >= median(at10));
}
