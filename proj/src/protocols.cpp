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

#include "qtb/protocols.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace qtb {

Povm projective_povm(const ComplexMatrix& basis) {
  Povm povm;
  povm.elements.reserve(basis.cols());
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    povm.elements.push_back(basis.col(k) * basis.col(k).adjoint());
  }
  return povm;
}

void check_povm(const Povm& povm, double tolerance) {
  if (povm.elements.empty()) throw Error("POVM has no elements");
  const int d = povm.dim();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const ComplexMatrix& e : povm.elements) {
    if (e.rows() != d || e.cols() != d) throw Error("POVM elements differ in size");
    if (hermiticity_error(e) > tolerance) throw Error("POVM element is not Hermitian");
    if (eig_hermitian(e).values.minCoeff() < -tol::kPsd) throw Error("POVM element is not PSD");
    sum += e;
  }
  if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > tolerance) {
    throw Error("POVM elements do not sum to the identity");
  }
}

namespace {

MeasurementSpec basis_spec(ComplexMatrix basis) {
  MeasurementSpec spec;
  spec.kind = MeasurementKind::kPovm;
  spec.povm = projective_povm(basis);
  spec.basis = std::move(basis);
  return spec;
}

/// All Kronecker products choosing one basis per subsystem, first subsystem slowest.
std::vector<ComplexMatrix> product_bases(const std::vector<std::vector<ComplexMatrix>>& local) {
  std::vector<ComplexMatrix> out{ComplexMatrix::Identity(1, 1)};
  for (const auto& choices : local) {
    std::vector<ComplexMatrix> next;
    next.reserve(out.size() * choices.size());
    for (const ComplexMatrix& prefix : out)
      for (const ComplexMatrix& b : choices) next.push_back(kron(prefix, b));
    out = std::move(next);
  }
  return out;
}

std::vector<MeasurementSpec> specs_with_shots(std::vector<ComplexMatrix> bases, std::int64_t shots) {
  const std::int64_t used = std::min<std::int64_t>(shots, static_cast<std::int64_t>(bases.size()));
  const std::vector<std::int64_t> split = allocate_shots(shots, used);
  std::vector<MeasurementSpec> specs;
  specs.reserve(used);
  for (std::int64_t i = 0; i < used; ++i) {
    specs.push_back(basis_spec(std::move(bases[i])));
    specs.back().shots = split[i];
  }
  return specs;
}

std::int64_t step_budget(const ProtocolRequest& request) {
  const std::int64_t remaining = request.budget - request.measured;
  return std::min(adaptive_step_shots(request.measured), remaining);
}

}  // namespace

std::vector<MeasurementSpec> fmub_protocol(const Dims& dims) {
  std::vector<std::vector<ComplexMatrix>> local;
  for (int dj : dims) local.push_back(mub_bases(dj));
  std::vector<MeasurementSpec> specs;
  for (ComplexMatrix& b : product_bases(local)) specs.push_back(basis_spec(std::move(b)));
  return specs;
}

std::vector<MeasurementSpec> mub_protocol(const Dims& dims) {
  std::vector<MeasurementSpec> specs;
  for (ComplexMatrix& b : mub_bases(total_dim(dims))) specs.push_back(basis_spec(std::move(b)));
  return specs;
}

std::vector<MeasurementSpec> pauli_protocol(int qubits) {
  if (qubits < 1) throw Error("pauli_protocol: need at least one qubit");
  const Complex i(0.0, 1.0);
  std::array<ComplexMatrix, 4> sigma;
  sigma[0] = ComplexMatrix::Identity(2, 2);
  sigma[1] = ComplexMatrix(2, 2);
  sigma[1] << 0.0, 1.0, 1.0, 0.0;
  sigma[2] = ComplexMatrix(2, 2);
  sigma[2] << 0.0, -i, i, 0.0;
  sigma[3] = ComplexMatrix(2, 2);
  sigma[3] << 1.0, 0.0, 0.0, -1.0;

  const int words = 1 << (2 * qubits);
  const int d = 1 << qubits;
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  std::vector<MeasurementSpec> specs;
  specs.reserve(words - 1);
  for (int w = 1; w < words; ++w) {
    std::vector<ComplexMatrix> factors;
    for (int q = qubits - 1; q >= 0; --q) factors.push_back(sigma[(w >> (2 * q)) & 3]);
    ComplexMatrix word = kron_all(factors);
    MeasurementSpec spec;
    spec.kind = MeasurementKind::kObservable;
    spec.povm.elements = {0.5 * (id + word), 0.5 * (id - word)};
    spec.operator_matrix = std::move(word);
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<std::int64_t> allocate_shots(std::int64_t total, std::int64_t settings) {
  if (settings < 1) throw Error("allocate_shots: need at least one setting");
  if (total < settings) {
    throw Error("allocate_shots: sample size " + std::to_string(total) + " is smaller than the " +
                std::to_string(settings) + " settings");
  }
  std::vector<std::int64_t> out(settings, total / settings);
  for (std::int64_t i = 0; i < total % settings; ++i) ++out[i];
  return out;
}

std::int64_t adaptive_step_shots(std::int64_t measured) {
  return std::max<std::int64_t>(100, measured / 30);
}

int max_orthogonal_components(const Dims& dims) {
  int sum = 0;
  for (int dj : dims) sum += dj;
  return sum - static_cast<int>(dims.size());
}

ComplexMatrix complete_to_basis(const ComplexVector& v, Rng& rng) {
  const int d = static_cast<int>(v.size());
  ComplexMatrix u(d, d);
  u.col(0) = v.normalized();
  int filled = 1;
  while (filled < d) {
    ComplexVector w = haar_vector(d, rng);
    for (int k = 0; k < filled; ++k) w -= u.col(k) * u.col(k).dot(w);
    // Second pass keeps the columns orthonormal to machine precision.
    for (int k = 0; k < filled; ++k) w -= u.col(k) * u.col(k).dot(w);
    const double norm = w.norm();
    if (norm < 1e-8) continue;
    u.col(filled++) = w / norm;
  }
  return u;
}

namespace {

/// Digits of every full index, most significant subsystem first.
std::vector<std::vector<int>> digit_table(const Dims& dims) {
  const int d = total_dim(dims);
  const int n = static_cast<int>(dims.size());
  std::vector<std::vector<int>> table(d, std::vector<int>(n));
  for (int a = 0; a < d; ++a) {
    int rest = a;
    for (int j = n - 1; j >= 0; --j) {
      table[a][j] = rest % dims[j];
      rest /= dims[j];
    }
  }
  return table;
}

double product_overlap(const ComplexMatrix& targets, const std::vector<ComplexVector>& local) {
  const ComplexVector phi = kron_all(local);
  return (targets.adjoint() * phi).squaredNorm();
}

}  // namespace

std::vector<ComplexVector> orthogonal_product_factors(const DensityMatrix& estimate, int components, Rng& rng) {
  const Dims& dims = estimate.dims;
  const int kmax = max_orthogonal_components(dims);
  if (components < 1 || components > kmax) {
    throw Error("orthogonal_product_vector: K must lie in [1, " + std::to_string(kmax) + "]");
  }
  constexpr int kRestarts = 5;
  constexpr int kSweeps = 100;
  constexpr double kTolerance = 1e-9;

  const int n = static_cast<int>(dims.size());
  const int d = total_dim(dims);
  const ComplexMatrix targets = eig_hermitian(estimate.matrix).vectors.leftCols(components);
  const auto digits = digit_table(dims);

  std::vector<ComplexVector> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < kRestarts && best_value > 1e-14; ++restart) {
    std::vector<ComplexVector> local;
    for (int dj : dims) local.push_back(haar_vector(dj, rng));
    double value = product_overlap(targets, local);
    for (int sweep = 0; sweep < kSweeps; ++sweep) {
      for (int j = 0; j < n; ++j) {
        // Contract every target with the fixed factors; what is left acts on subsystem j.
        ComplexMatrix reduced = ComplexMatrix::Zero(dims[j], components);
        for (int a = 0; a < d; ++a) {
          Complex weight(1.0);
          for (int i = 0; i < n; ++i)
            if (i != j) weight *= std::conj(local[i](digits[a][i]));
          reduced.row(digits[a][j]) += weight * targets.row(a);
        }
        const ComplexMatrix q = reduced * reduced.adjoint();
        const HermitianEigen e = eig_hermitian(0.5 * (q + q.adjoint()));
        local[j] = e.vectors.col(dims[j] - 1);
      }
      const double updated = product_overlap(targets, local);
      const bool settled = std::abs(value - updated) <= kTolerance * std::max(1.0, value) || updated < 1e-15;
      value = updated;
      if (settled) break;
    }
    if (value < best_value) {
      best_value = value;
      best = local;
    }
  }
  return best;
}

PureState orthogonal_product_vector(const DensityMatrix& estimate, int components, Rng& rng) {
  return PureState{estimate.dims, kron_all(orthogonal_product_factors(estimate, components, rng))};
}

bool is_factorized(const ComplexMatrix& m, const Dims& dims, double tolerance) {
  if (dims.size() < 2) return true;
  const int d = total_dim(dims);
  if (m.rows() != d || m.cols() != d) return false;
  // Every cut between leading and trailing subsystems must realign to a rank-one matrix.
  int left = 1;
  for (std::size_t cut = 1; cut < dims.size(); ++cut) {
    left *= dims[cut - 1];
    const int right = d / left;
    Eigen::MatrixXcd realigned(left * left, right * right);
    for (int i = 0; i < left; ++i)
      for (int j = 0; j < left; ++j)
        for (int k = 0; k < right; ++k)
          for (int l = 0; l < right; ++l)
            realigned(i * left + j, k * right + l) = m(i * right + k, j * right + l);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(realigned);
    const RealVector s = svd.singularValues();
    if (s.size() > 1 && s(1) > tolerance * std::max(1.0, s(0))) return false;
  }
  return true;
}

StaticProtocol::StaticProtocol(std::vector<MeasurementSpec> settings) : settings_(std::move(settings)) {
  if (settings_.empty()) throw Error("static protocol has no settings");
}

std::vector<MeasurementSpec> StaticProtocol::next(const ProtocolRequest& request) {
  if (request.measured > 0 || request.budget <= 0) return {};
  const std::vector<std::int64_t> split =
      allocate_shots(request.budget, static_cast<std::int64_t>(settings_.size()));
  std::vector<MeasurementSpec> out = settings_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].shots = split[i];
  return out;
}

namespace {

class AmubHandler final : public ProtocolHandler {
 public:
  AmubHandler(Dims dims, Estimator estimator)
      : dims_(std::move(dims)), estimator_(std::move(estimator)), mub_(mub_bases(total_dim(dims_))) {}

  std::vector<MeasurementSpec> next(const ProtocolRequest& request) override {
    const std::int64_t shots = step_budget(request);
    if (shots <= 0) return {};
    std::vector<ComplexMatrix> bases = mub_;
    if (!request.records.empty()) {
      const EstimatorReport report = estimator_(request.records, dims_);
      const ComplexMatrix eigenbasis = eig_hermitian(report.estimate.matrix).vectors;
      for (ComplexMatrix& b : bases) b = eigenbasis * b;
    }
    return specs_with_shots(std::move(bases), shots);
  }

 private:
  Dims dims_;
  Estimator estimator_;
  std::vector<ComplexMatrix> mub_;
};

void require_multipartite(const Dims& dims, const char* name) {
  if (dims.size() < 2) {
    throw Error(std::string(name) + " needs at least two subsystems (a single system has a unique completion)");
  }
}

/// Local unitaries whose first columns form a product vector orthogonal to K
/// principal components of the current estimate; random when nothing was measured yet.
std::vector<ComplexMatrix> oriented_local_bases(const Dims& dims, const Estimator& estimator,
                                                const ProtocolRequest& request, Rng& rng) {
  std::vector<ComplexMatrix> local;
  if (request.records.empty()) {
    for (int dj : dims) local.push_back(haar_unitary(dj, rng));
    return local;
  }
  const EstimatorReport report = estimator(request.records, dims);
  std::uniform_int_distribution<int> pick(1, max_orthogonal_components(dims));
  const int components = pick(rng);
  for (const ComplexVector& factor : orthogonal_product_factors(report.estimate, components, rng)) {
    local.push_back(complete_to_basis(factor, rng));
  }
  return local;
}

class FoHandler final : public ProtocolHandler {
 public:
  FoHandler(Dims dims, Estimator estimator, Rng rng)
      : dims_(std::move(dims)), estimator_(std::move(estimator)), rng_(std::move(rng)) {
    require_multipartite(dims_, "FO protocol");
  }

  std::vector<MeasurementSpec> next(const ProtocolRequest& request) override {
    const std::int64_t shots = step_budget(request);
    if (shots <= 0) return {};
    const std::vector<ComplexMatrix> local = oriented_local_bases(dims_, estimator_, request, rng_);
    return specs_with_shots({kron_all(local)}, shots);
  }

 private:
  Dims dims_;
  Estimator estimator_;
  Rng rng_;
};

class FomubHandler final : public ProtocolHandler {
 public:
  FomubHandler(Dims dims, Estimator estimator, Rng rng)
      : dims_(std::move(dims)), estimator_(std::move(estimator)), rng_(std::move(rng)) {
    require_multipartite(dims_, "FOMUB protocol");
    for (int dj : dims_) local_mub_.push_back(mub_bases(dj));
  }

  std::vector<MeasurementSpec> next(const ProtocolRequest& request) override {
    const std::int64_t shots = step_budget(request);
    if (shots <= 0) return {};
    std::vector<std::vector<ComplexMatrix>> rotated = local_mub_;
    if (!request.records.empty()) {
      const std::vector<ComplexMatrix> local = oriented_local_bases(dims_, estimator_, request, rng_);
      for (std::size_t j = 0; j < dims_.size(); ++j)
        for (ComplexMatrix& b : rotated[j]) b = local[j] * b;
    }
    return specs_with_shots(product_bases(rotated), shots);
  }

 private:
  Dims dims_;
  Estimator estimator_;
  Rng rng_;
  std::vector<std::vector<ComplexMatrix>> local_mub_;
};

}  // namespace

std::unique_ptr<ProtocolHandler> amub_handler(const Dims& dims, Estimator estimator) {
  return std::make_unique<AmubHandler>(dims, std::move(estimator));
}

std::unique_ptr<ProtocolHandler> fo_handler(const Dims& dims, Estimator estimator, Rng rng) {
  return std::make_unique<FoHandler>(dims, std::move(estimator), std::move(rng));
}

std::unique_ptr<ProtocolHandler> fomub_handler(const Dims& dims, Estimator estimator, Rng rng) {
  return std::make_unique<FomubHandler>(dims, std::move(estimator), std::move(rng));
}

}  // namespace qtb
