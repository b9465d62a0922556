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

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qtb {

template <typename Scalar>
using ComplexMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using RealVector = Eigen::VectorXd;

/// Subsystem dimensions d_1, ..., d_n of a composite system.
using Dims = std::vector<int>;

/// Every random quantity is drawn from a per-run engine; engines are never shared between runs.
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPsd = 1e-10;
inline constexpr double kNorm = 1e-12;
inline constexpr double kUnitary = 1e-10;
inline constexpr double kEigHermitian = 1e-8;
inline constexpr double kPovmCompleteness = 1e-8;
inline constexpr double kMub = 1e-10;
inline constexpr double kBornNegative = 1e-12;
inline constexpr double kBornSum = 1e-8;
inline constexpr double kEstimatorOutput = 1e-8;
}  // namespace tol

int total_dim(const Dims& dims);

struct DensityMatrix {
  Dims dims;
  ComplexMatrix matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

struct PureState {
  Dims dims;
  ComplexVector amplitudes;

  int dim() const { return static_cast<int>(amplitudes.size()); }
};

/// Throws Error unless `rho` is Hermitian, unit-trace and PSD within `tolerance`
/// and its size matches its dims.
void check_density_matrix(const DensityMatrix& rho, double tolerance = tol::kPsd);

/// Builds a validated density matrix.
DensityMatrix make_density_matrix(Dims dims, ComplexMatrix matrix, double tolerance = tol::kPsd);

DensityMatrix to_density_matrix(const PureState& psi);

template <typename Derived>
auto dagger(const Eigen::MatrixBase<Derived>& m) {
  return m.adjoint();
}

template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::PlainObject kron(const Eigen::MatrixBase<DerivedA>& a,
                                    const Eigen::MatrixBase<DerivedB>& b) {
  typename DerivedA::PlainObject out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Kronecker product of a list of factors, first factor most significant.
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);
ComplexVector kron_all(std::span<const ComplexVector> factors);

struct HermitianEigen {
  RealVector values;     // descending
  ComplexMatrix vectors;  // columns match `values`
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
HermitianEigen eig_hermitian(const ComplexMatrix& m);

/// Square root of a PSD matrix; eigenvalues below zero are clipped first.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Reduced state on the subsystems listed in `keep`.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

ComplexMatrix haar_unitary(int d, Rng& rng);
PureState haar_vector(const Dims& dims, Rng& rng);
ComplexVector haar_vector(int d, Rng& rng);

/// Euclidean projection onto the probability simplex.
RealVector project_to_simplex(const RealVector& v);

/// Rebuilds V diag(lambda) V^dagger.
ComplexMatrix from_spectrum(const RealVector& values, const ComplexMatrix& vectors);

}  // namespace qtb
