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

#include "qtb/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace qtb {

int total_dim(const Dims& dims) {
  if (dims.empty()) throw Error("dims must not be empty");
  int d = 1;
  for (int dj : dims) {
    if (dj < 1) throw Error("subsystem dimensions must be positive");
    d *= dj;
  }
  return d;
}

void check_density_matrix(const DensityMatrix& rho, double tolerance) {
  const int d = total_dim(rho.dims);
  if (rho.matrix.rows() != d || rho.matrix.cols() != d) {
    throw Error("density matrix size does not match subsystem dimensions");
  }
  if (!rho.matrix.allFinite()) throw Error("density matrix has non-finite entries");
  if (hermiticity_error(rho.matrix) > tolerance) throw Error("density matrix is not Hermitian");
  if (std::abs(rho.matrix.trace() - Complex(1.0)) > tolerance) {
    throw Error("density matrix does not have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tolerance) {
    std::ostringstream msg;
    msg << "density matrix is not positive semidefinite (min eigenvalue "
        << es.eigenvalues().minCoeff() << ")";
    throw Error(msg.str());
  }
}

DensityMatrix make_density_matrix(Dims dims, ComplexMatrix matrix, double tolerance) {
  DensityMatrix rho{std::move(dims), std::move(matrix)};
  check_density_matrix(rho, tolerance);
  return rho;
}

DensityMatrix to_density_matrix(const PureState& psi) {
  return DensityMatrix{psi.dims, psi.amplitudes * psi.amplitudes.adjoint()};
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) return ComplexMatrix::Identity(1, 1);
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

ComplexVector kron_all(std::span<const ComplexVector> factors) {
  if (factors.empty()) return ComplexVector::Ones(1);
  ComplexVector out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

HermitianEigen eig_hermitian(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw Error("eig_hermitian: matrix is not square");
  if (hermiticity_error(m) > tol::kEigHermitian) throw Error("eig_hermitian: matrix is not Hermitian");
  // Symmetrize so roundoff asymmetry does not leak into the solver.
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) throw Error("eig_hermitian: solver failed");
  const Eigen::Index n = h.rows();
  HermitianEigen out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

ComplexMatrix from_spectrum(const RealVector& values, const ComplexMatrix& vectors) {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  const HermitianEigen e = eig_hermitian(m);
  return from_spectrum(e.values.cwiseMax(0.0).cwiseSqrt(), e.vectors);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw Error("fidelity: dimension mismatch");
  check_density_matrix(rho);
  check_density_matrix(sigma);
  const ComplexMatrix s = psd_sqrt(rho.matrix);
  const ComplexMatrix inner = s * sigma.matrix * s;
  const HermitianEigen e = eig_hermitian(0.5 * (inner + inner.adjoint()));
  // Eigenvalues at rounding level would contribute their square roots; drop them.
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() * inner.rows() * std::max(e.values.maxCoeff(), 0.0);
  double root_trace = 0.0;
  for (double v : e.values) root_trace += v > floor ? std::sqrt(v) : 0.0;
  return std::clamp(root_trace * root_trace, 0.0, 1.0);
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  const ComplexMatrix diff = a - b;
  const HermitianEigen e = eig_hermitian(0.5 * (diff + diff.adjoint()));
  return 0.5 * e.values.cwiseAbs().sum();
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const int n = static_cast<int>(rho.dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw Error("partial_trace: subsystem index out of range");
    kept[k] = true;
  }
  const int kept_count = static_cast<int>(std::count(kept.begin(), kept.end(), true));
  if (kept_count == 0 || kept_count == n) {
    throw Error("partial_trace: keep set must be a nonempty proper subset");
  }
  const int d = total_dim(rho.dims);
  if (rho.dim() != d) throw Error("partial_trace: matrix size does not match dims");

  Dims out_dims;
  for (int j = 0; j < n; ++j)
    if (kept[j]) out_dims.push_back(rho.dims[j]);
  const int dk = total_dim(out_dims);
  const int dt = d / dk;

  // Split each full index into its kept and traced parts.
  std::vector<int> kept_index(d), traced_index(d);
  for (int a = 0; a < d; ++a) {
    int rest = a, ki = 0, ti = 0, kstride = 1, tstride = 1;
    for (int j = n - 1; j >= 0; --j) {
      const int digit = rest % rho.dims[j];
      rest /= rho.dims[j];
      if (kept[j]) {
        ki += digit * kstride;
        kstride *= rho.dims[j];
      } else {
        ti += digit * tstride;
        tstride *= rho.dims[j];
      }
    }
    kept_index[a] = ki;
    traced_index[a] = ti;
  }
  std::vector<std::vector<int>> by_traced(dt);
  for (int a = 0; a < d; ++a) by_traced[traced_index[a]].push_back(a);

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (const auto& group : by_traced)
    for (int a : group)
      for (int b : group) out(kept_index[a], kept_index[b]) += rho.matrix(a, b);
  return DensityMatrix{std::move(out_dims), std::move(out)};
}

namespace {

ComplexMatrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  return g;
}

}  // namespace

ComplexMatrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw Error("haar_unitary: dimension must be positive");
  const ComplexMatrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    const Complex phase = mag > 0.0 ? r(j, j) / mag : Complex(1.0);
    q.col(j) *= phase;
  }
  return q;
}

ComplexVector haar_vector(int d, Rng& rng) {
  if (d < 1) throw Error("haar_vector: dimension must be positive");
  ComplexVector v = ginibre(d, 1, rng).col(0);
  double norm = v.norm();
  while (norm == 0.0) {
    v = ginibre(d, 1, rng).col(0);
    norm = v.norm();
  }
  return v / norm;
}

PureState haar_vector(const Dims& dims, Rng& rng) {
  return PureState{dims, haar_vector(total_dim(dims), rng)};
}

RealVector project_to_simplex(const RealVector& v) {
  if (v.size() == 0) throw Error("project_to_simplex: empty vector");
  if (!v.allFinite()) throw Error("project_to_simplex: non-finite entries");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

}  // namespace qtb
