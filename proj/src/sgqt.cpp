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

#include "qtb/sgqt.hpp"

#include <cmath>

namespace qtb {

double SgqtParams::alpha(int k) const { return a / std::pow(k + 1 + A, s); }

double SgqtParams::beta(int k) const { return b / std::pow(k + 1, t); }

void validate(const SgqtParams& params) {
  if (params.A < 0.0) throw Error("sgqt.A must be nonnegative");
  if (params.a < 0.0 || params.b <= 0.0 || params.s <= 0.0 || params.t <= 0.0) {
    throw Error("sgqt gains must be positive");
  }
  if (params.shots_per_eval < 1) throw Error("sgqt.shots must be at least 1");
}

namespace {

/// Complex amplitudes from 2d real coordinates (real parts, then imaginary parts).
ComplexVector to_amplitudes(const RealVector& x) {
  const Eigen::Index d = x.size() / 2;
  ComplexVector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = Complex(x(i), x(d + i));
  return v;
}

RealVector to_coordinates(const ComplexVector& v) {
  const Eigen::Index d = v.size();
  RealVector x(2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    x(i) = v(i).real();
    x(d + i) = v(i).imag();
  }
  return x;
}

/// Unit norm, largest amplitude real and positive.
ComplexVector canonical(ComplexVector v) {
  v.normalize();
  Eigen::Index largest = 0;
  v.cwiseAbs().maxCoeff(&largest);
  const double mag = std::abs(v(largest));
  if (mag > 0.0) v *= std::conj(v(largest)) / mag;
  return v;
}

struct SearchState {
  Dims dims;
  SgqtParams params;
  Rng rng;
  ComplexVector psi;
  int iteration = 0;
  RealVector delta;
  bool awaiting = false;
};

MeasurementSpec projector_spec(const ComplexVector& v, std::int64_t shots) {
  const Eigen::Index d = v.size();
  const ComplexMatrix p = v * v.adjoint();
  MeasurementSpec spec;
  spec.kind = MeasurementKind::kOperator;
  spec.povm.elements = {p, ComplexMatrix::Identity(d, d) - p};
  spec.operator_matrix = p;
  spec.shots = shots;
  return spec;
}

class SgqtProtocol final : public ProtocolHandler {
 public:
  explicit SgqtProtocol(std::shared_ptr<SearchState> state) : state_(std::move(state)) {}

  std::vector<MeasurementSpec> next(const ProtocolRequest& request) override {
    SearchState& st = *state_;
    const std::int64_t per_eval = st.params.shots_per_eval;
    if (request.budget < 2 * per_eval) {
      throw Error("sgqt: budget " + std::to_string(request.budget) + " is below one iteration (" +
                  std::to_string(2 * per_eval) + " copies)");
    }
    if (st.awaiting) absorb(request.records);
    const std::int64_t iterations = request.budget / (2 * per_eval);
    if (st.iteration >= iterations) return {};

    const double beta = st.params.beta(st.iteration);
    std::bernoulli_distribution coin(0.5);
    st.delta.resize(2 * st.psi.size());
    for (Eigen::Index i = 0; i < st.delta.size(); ++i) st.delta(i) = coin(st.rng) ? 1.0 : -1.0;
    const RealVector x = to_coordinates(st.psi);
    st.awaiting = true;
    return {projector_spec(to_amplitudes(x + beta * st.delta).normalized(), per_eval),
            projector_spec(to_amplitudes(x - beta * st.delta).normalized(), per_eval)};
  }

 private:
  void absorb(std::span<const MeasurementRecord> records) {
    SearchState& st = *state_;
    if (records.size() < 2) throw Error("sgqt: missing results of the previous iteration");
    const MeasurementRecord& plus = records[records.size() - 2];
    const MeasurementRecord& minus = records[records.size() - 1];
    auto success = [](const MeasurementRecord& r) {
      return static_cast<double>(r.counts.at(0)) / static_cast<double>(r.counts.at(0) + r.counts.at(1));
    };
    const double beta = st.params.beta(st.iteration);
    const double alpha = st.params.alpha(st.iteration);
    // Delta entries are +/-1, so dividing by them is multiplying.
    const RealVector gradient = (success(plus) - success(minus)) / (2.0 * beta) * st.delta;
    st.psi = canonical(to_amplitudes(to_coordinates(st.psi) + alpha * gradient));
    ++st.iteration;
    st.awaiting = false;
  }

  std::shared_ptr<SearchState> state_;
};

}  // namespace

SgqtMethod sgqt_method(const Dims& dims, const SgqtParams& params, Rng rng, std::optional<ComplexVector> initial) {
  validate(params);
  const int d = total_dim(dims);
  auto state = std::make_shared<SearchState>();
  state->dims = dims;
  state->params = params;
  state->psi = initial ? *initial : haar_vector(d, rng);
  if (state->psi.size() != d) throw Error("sgqt: initial guess has the wrong dimension");
  state->psi = canonical(state->psi);
  state->rng = std::move(rng);

  SgqtMethod method;
  method.protocol = std::make_unique<SgqtProtocol>(state);
  method.estimator = [state](std::span<const MeasurementRecord>, const Dims& est_dims) {
    EstimatorReport report{make_density_matrix(est_dims, state->psi * state->psi.adjoint(), tol::kEstimatorOutput),
                           1, state->iteration, true, {}};
    return report;
  };
  return method;
}

}  // namespace qtb
