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
#include <string>
#include <string_view>

#include "qtb/qcore.hpp"

namespace qtb {

/// The four benchmark state classes.
enum class TestKind { kRps, kRmspt2, kRmsptD, kRnp };

std::string_view to_string(TestKind kind);
/// Parses "rps", "rmspt2", "rmsptd" or "rnp".
TestKind parse_test_kind(std::string_view id);

/// Rank of a generic state from the test class over total dimension d.
int structural_rank(TestKind kind, int d);

struct NoiseParams {
  double p = 0.0;      // depolarizing weight
  double e0 = 0.0;     // per-qubit initialization error
  double sigma = 0.0;  // random-unitary error scale
};

/// Optional overrides for the per-run random noise draws of the RNP class.
struct RnpOverrides {
  std::optional<double> p;
  std::optional<double> e0;
};

/// U|0> with U Haar-distributed.
DensityMatrix gen_rps(const Dims& dims, Rng& rng);

/// Tr_A |psi><psi| with |psi> Haar on d * d_a, ancilla traced out.
DensityMatrix gen_rmspt(const Dims& dims, int ancilla_dim, Rng& rng);

/// n-fold tensor power of (1-e0)|0><0| + e0|1><1|.
DensityMatrix noisy_register(const Dims& dims, double e0);

/// (1-p) rho + p I/d.
DensityMatrix depolarize(const DensityMatrix& rho, double p);

/// (1-p) U rho0(e0) U^dagger + p I/d with p ~ unif(0, 0.01), e0 ~ unif(0, 0.05).
DensityMatrix gen_rnp(const Dims& dims, Rng& rng, const RnpOverrides& overrides = {});

/// Draws a state of the given class.
DensityMatrix generate_state(TestKind kind, const Dims& dims, Rng& rng);

/// Applies W to |phi>: a|phi> + sqrt(1-a^2) g_perp/|g_perp| with a = 1 - xi^2/2,
/// xi ~ norm(0, sigma), g Haar-random. Draws with a <= 0 or g parallel to phi are redrawn.
PureState random_unitary_error(const PureState& phi, double sigma, Rng& rng);

/// Same map for a fixed overlap a, exposed for the averaging identity.
ComplexVector random_unitary_error_fixed(const ComplexVector& phi, double a, Rng& rng);

/// p = d/(d-1) (sigma^2 - 3/4 sigma^4).
double depolarizing_weight(double sigma, int d);

}  // namespace qtb
