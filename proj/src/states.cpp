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

#include "qtb/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace qtb {

std::string_view to_string(TestKind kind) {
  switch (kind) {
    case TestKind::kRps: return "rps";
    case TestKind::kRmspt2: return "rmspt2";
    case TestKind::kRmsptD: return "rmsptd";
    case TestKind::kRnp: return "rnp";
  }
  return "?";
}

TestKind parse_test_kind(std::string_view id) {
  if (id == "rps") return TestKind::kRps;
  if (id == "rmspt2") return TestKind::kRmspt2;
  if (id == "rmsptd") return TestKind::kRmsptD;
  if (id == "rnp") return TestKind::kRnp;
  throw Error("unknown test identifier '" + std::string(id) + "' (expected rps, rmspt2, rmsptd or rnp)");
}

int structural_rank(TestKind kind, int d) {
  switch (kind) {
    case TestKind::kRps: return 1;
    case TestKind::kRmspt2: return std::min(2, d);
    case TestKind::kRmsptD: return d;
    case TestKind::kRnp: return d;
  }
  return d;
}

DensityMatrix gen_rps(const Dims& dims, Rng& rng) {
  const int d = total_dim(dims);
  if (d < 2) throw Error("gen_rps: total dimension must be at least 2");
  const ComplexMatrix u = haar_unitary(d, rng);
  const ComplexVector psi = u.col(0);
  return DensityMatrix{dims, psi * psi.adjoint()};
}

DensityMatrix gen_rmspt(const Dims& dims, int ancilla_dim, Rng& rng) {
  if (ancilla_dim < 2) throw Error("gen_rmspt: ancilla dimension must be at least 2");
  const int d = total_dim(dims);
  const ComplexVector psi = haar_unitary(d * ancilla_dim, rng).col(0);
  // System is the most significant factor; the ancilla index runs fastest.
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (int a = 0; a < ancilla_dim; ++a) {
    const ComplexVector slice = psi(Eigen::seqN(a, d, ancilla_dim));
    rho += slice * slice.adjoint();
  }
  return DensityMatrix{dims, rho};
}

DensityMatrix noisy_register(const Dims& dims, double e0) {
  for (int dj : dims)
    if (dj != 2) throw Error("noisy_register: all subsystems must be qubits");
  if (e0 < 0.0 || e0 > 1.0) throw Error("noisy_register: e0 must lie in [0, 1]");
  const int d = total_dim(dims);
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const int ones = std::popcount(static_cast<unsigned>(i));
    const int zeros = static_cast<int>(dims.size()) - ones;
    rho(i, i) = std::pow(1.0 - e0, zeros) * std::pow(e0, ones);
  }
  return DensityMatrix{dims, rho};
}

DensityMatrix depolarize(const DensityMatrix& rho, double p) {
  if (p < 0.0 || p > 1.0) throw Error("depolarize: p must lie in [0, 1]");
  const int d = rho.dim();
  ComplexMatrix out = (1.0 - p) * rho.matrix;
  out.diagonal().array() += p / d;
  return DensityMatrix{rho.dims, out};
}

DensityMatrix gen_rnp(const Dims& dims, Rng& rng, const RnpOverrides& overrides) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double p = overrides.p ? *overrides.p : 0.01 * unif(rng);
  const double e0 = overrides.e0 ? *overrides.e0 : 0.05 * unif(rng);
  const DensityMatrix rho0 = noisy_register(dims, e0);
  const ComplexMatrix u = haar_unitary(rho0.dim(), rng);
  return depolarize(DensityMatrix{dims, u * rho0.matrix * u.adjoint()}, p);
}

DensityMatrix generate_state(TestKind kind, const Dims& dims, Rng& rng) {
  switch (kind) {
    case TestKind::kRps: return gen_rps(dims, rng);
    case TestKind::kRmspt2: return gen_rmspt(dims, 2, rng);
    case TestKind::kRmsptD: return gen_rmspt(dims, total_dim(dims), rng);
    case TestKind::kRnp: return gen_rnp(dims, rng);
  }
  throw Error("generate_state: unknown test kind");
}

ComplexVector random_unitary_error_fixed(const ComplexVector& phi, double a, Rng& rng) {
  if (a < 0.0 || a > 1.0) throw Error("random_unitary_error: overlap must lie in [0, 1]");
  const int d = static_cast<int>(phi.size());
  if (d == 1 || a == 1.0) return phi;
  for (;;) {
    const ComplexVector g = haar_vector(d, rng);
    const ComplexVector perp = g - phi * phi.dot(g);
    const double norm = perp.norm();
    if (norm < 1e-12) continue;
    return a * phi + std::sqrt(1.0 - a * a) * perp / norm;
  }
}

PureState random_unitary_error(const PureState& phi, double sigma, Rng& rng) {
  if (sigma < 0.0) throw Error("random_unitary_error: sigma must be nonnegative");
  if (sigma == 0.0) return phi;
  std::normal_distribution<double> normal(0.0, sigma);
  double a = 0.0;
  do {
    const double xi = normal(rng);
    a = 1.0 - 0.5 * xi * xi;
  } while (a <= 0.0);
  return PureState{phi.dims, random_unitary_error_fixed(phi.amplitudes, a, rng)};
}

double depolarizing_weight(double sigma, int d) {
  if (sigma < 0.0) throw Error("depolarizing_weight: sigma must be nonnegative");
  if (d < 2) throw Error("depolarizing_weight: dimension must be at least 2");
  const double s2 = sigma * sigma;
  return static_cast<double>(d) / (d - 1) * (s2 - 0.75 * s2 * s2);
}

}  // namespace qtb
