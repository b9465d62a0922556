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
#include <memory>
#include <optional>

#include "qtb/estimators.hpp"
#include "qtb/protocols.hpp"

namespace qtb {

/// Gains of the simultaneous-perturbation update:
/// alpha_k = a / (k + 1 + A)^s, beta_k = b / (k + 1)^t.
struct SgqtParams {
  double A = 0.0;
  double a = 3.0;
  double b = 0.1;
  double s = 0.602;
  double t = 0.101;
  std::int64_t shots_per_eval = 100;

  double alpha(int k) const;
  double beta(int k) const;
};

void validate(const SgqtParams& params);

/// A protocol handler and an estimator sharing one self-guided search.
/// Each iteration measures the projectors onto normalize(psi +/- beta_k Delta_k)
/// as two-outcome POVMs and moves psi along the estimated fidelity gradient.
struct SgqtMethod {
  std::unique_ptr<ProtocolHandler> protocol;
  Estimator estimator;
};

/// `initial` defaults to a Haar-random pure state drawn from `rng`.
SgqtMethod sgqt_method(const Dims& dims, const SgqtParams& params, Rng rng,
                       std::optional<ComplexVector> initial = std::nullopt);

}  // namespace qtb
