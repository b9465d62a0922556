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

#include <cmath>
#include <complex>

#include "qtb/engine.hpp"
#include "qtb/qcore.hpp"

namespace qtb::testing {

using cd = std::complex<double>;

inline ComplexMatrix random_density(int d, Rng& rng, int rank = -1) {
  if (rank < 0) rank = d;
  std::normal_distribution<double> n;
  ComplexMatrix g(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = cd(n(rng), n(rng));
  ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline ComplexMatrix random_hermitian(int d, Rng& rng) {
  std::normal_distribution<double> n;
  ComplexMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cd(n(rng), n(rng));
  return (g + g.adjoint()) / 2.0;
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_density(const ComplexMatrix& m, double tolerance) {
  if (hermiticity_error(m) > tolerance) return false;
  if (std::abs(m.trace() - cd(1.0)) > tolerance) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((m + m.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff() >= -tolerance;
}

/// Sampled records of `specs` on `rho`, each setting receiving its own shot count.
inline std::vector<MeasurementRecord> simulate(const ComplexMatrix& rho, std::vector<MeasurementSpec> specs,
                                               std::int64_t shots_each, Rng& rng) {
  const DensityMatrix state{{static_cast<int>(rho.rows())}, rho};
  std::vector<MeasurementRecord> out;
  for (MeasurementSpec& s : specs) {
    s.shots = shots_each;
    out.push_back(MeasurementRecord{s, sample_counts(born_probabilities(state, s.povm), shots_each, rng)});
  }
  return out;
}

/// Counts proportional to the exact probabilities, scaled so that rounding is negligible.
inline std::vector<MeasurementRecord> exact(const ComplexMatrix& rho, std::vector<MeasurementSpec> specs,
                                            double scale = 1e12) {
  std::vector<MeasurementRecord> out;
  for (MeasurementSpec& s : specs) {
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
    for (const ComplexMatrix& e : s.povm.elements) {
      counts.push_back(std::llround(std::max(0.0, (rho * e).trace().real()) * scale));
      total += counts.back();
    }
    s.shots = total;
    out.push_back(MeasurementRecord{s, counts});
  }
  return out;
}

}  // namespace qtb::testing
