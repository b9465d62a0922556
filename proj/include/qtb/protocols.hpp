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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtb/estimators.hpp"
#include "qtb/measurement.hpp"

namespace qtb {

/// Dimensions for which a complete set of d+1 MUBs is built.
bool mub_supported(int d);

/// d+1 mutually unbiased bases (columns are basis vectors); the first is the identity.
/// Throws for dimensions outside {2, 3, 4, 5, 7, 8, 9}.
std::vector<ComplexMatrix> mub_bases(int d);

/// Product bases of per-subsystem MUBs, prod_j (d_j + 1) settings.
std::vector<MeasurementSpec> fmub_protocol(const Dims& dims);
std::vector<MeasurementSpec> mub_protocol(const Dims& dims);

/// 4^n - 1 Pauli words (identity word excluded), each as its +/-1 eigenprojector POVM.
std::vector<MeasurementSpec> pauli_protocol(int qubits);

/// Equal split of N shots over M settings; the first N mod M settings get one extra.
std::vector<std::int64_t> allocate_shots(std::int64_t total, std::int64_t settings);

/// Shots for one adaptive step after `measured` copies: max(100, floor(measured / 30)).
std::int64_t adaptive_step_shots(std::int64_t measured);

/// Sum_j d_j - n.
int max_orthogonal_components(const Dims& dims);

/// Local factors of the product vector below, one per subsystem.
std::vector<ComplexVector> orthogonal_product_factors(const DensityMatrix& estimate, int components, Rng& rng);

/// Product vector minimizing its overlap with the top-K eigenvectors of `estimate`.
PureState orthogonal_product_vector(const DensityMatrix& estimate, int components, Rng& rng);

/// Unitary whose first column is `v` and whose remaining columns are random.
ComplexMatrix complete_to_basis(const ComplexVector& v, Rng& rng);

/// True when `m` is a Kronecker product of blocks sized by `dims` (up to `tolerance`).
bool is_factorized(const ComplexMatrix& m, const Dims& dims, double tolerance = 1e-8);

/// What the handler sees of a running experiment. The true state is not part of it.
struct ProtocolRequest {
  std::int64_t measured = 0;
  std::int64_t budget = 0;
  std::span<const MeasurementRecord> records;
};

/// Decides which measurements to perform next. An empty batch means the protocol is done.
/// A handler instance belongs to a single experiment run.
class ProtocolHandler {
 public:
  virtual ~ProtocolHandler() = default;
  virtual std::vector<MeasurementSpec> next(const ProtocolRequest& request) = 0;
};

/// Issues a fixed list of settings once, splitting the whole budget with allocate_shots.
class StaticProtocol final : public ProtocolHandler {
 public:
  explicit StaticProtocol(std::vector<MeasurementSpec> settings);
  std::vector<MeasurementSpec> next(const ProtocolRequest& request) override;

 private:
  std::vector<MeasurementSpec> settings_;
};

std::unique_ptr<ProtocolHandler> amub_handler(const Dims& dims, Estimator estimator);
std::unique_ptr<ProtocolHandler> fo_handler(const Dims& dims, Estimator estimator, Rng rng);
std::unique_ptr<ProtocolHandler> fomub_handler(const Dims& dims, Estimator estimator, Rng rng);

}  // namespace qtb
