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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtb/measurement.hpp"

namespace qtb {

struct EstimatorReport {
  DensityMatrix estimate;
  int rank_used = 0;
  int iterations = 0;
  bool converged = true;
  std::vector<double> pvalues;  // per tried rank, adequate-rank search only
};

/// Reconstructs a state from all records gathered so far.
using Estimator = std::function<EstimatorReport(std::span<const MeasurementRecord>, const Dims&)>;

/// Sum over settings and outcomes of n ln Tr(rho P); -infinity when a
/// positive count meets a zero probability.
double log_likelihood(const ComplexMatrix& rho, std::span<const MeasurementRecord> records);

/// Least-squares inversion of frequencies, eigenvalues projected onto the simplex.
/// Throws when the POVM set is not informationally complete.
EstimatorReport ppi(std::span<const MeasurementRecord> records, const Dims& dims);

/// Same inversion for explicit (possibly non-physical) frequency vectors.
EstimatorReport ppi_frequencies(std::span<const Povm> povms, std::span<const RealVector> frequencies,
                                const Dims& dims);

/// Shot-weighted least squares over density matrices (projected gradient).
EstimatorReport frls(std::span<const MeasurementRecord> records, const Dims& dims);

/// Full-rank maximum likelihood by diluted fixed-point iteration.
EstimatorReport frml(std::span<const MeasurementRecord> records, const Dims& dims);

/// Maximum likelihood over rank-r states rho = c c^dagger.
EstimatorReport trml(std::span<const MeasurementRecord> records, const Dims& dims, int rank);

/// Pearson chi-squared adequacy p-value of `rho_fit` as a rank-r model.
double chi2_pvalue(std::span<const MeasurementRecord> records, const ComplexMatrix& rho_fit, int rank);

/// Degrees of freedom used by chi2_pvalue (may be <= 0).
int chi2_dof(std::span<const MeasurementRecord> records, const ComplexMatrix& rho_fit, int rank);

/// Rank chosen by sequential chi-squared tests, then fit by trml.
EstimatorReport arml(std::span<const MeasurementRecord> records, const Dims& dims, double alpha = 0.05);

/// Parses "ppi", "frls", "frml", "trml:<r>" or "arml".
Estimator make_estimator(std::string_view id);
/// Throws for malformed identifiers without constructing anything.
void validate_estimator_id(std::string_view id);

}  // namespace qtb
