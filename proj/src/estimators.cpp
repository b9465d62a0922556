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

#include "qtb/estimators.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "qtb/stats.hpp"

namespace qtb {
namespace {

constexpr int kMaxIterations = 5000;
constexpr double kStationarity = 1e-7;

/// All outcomes of all records, flattened. Column k of `ops` is vec(P_k).
struct Outcomes {
  int d = 0;
  Eigen::MatrixXcd ops;
  RealVector counts;
  RealVector setting_shots;  // shots of the setting each outcome belongs to
  std::vector<int> setting_start;
  double total = 0.0;
};

Outcomes flatten(std::span<const MeasurementRecord> records) {
  if (records.empty()) throw Error("estimator needs at least one measurement record");
  Outcomes out;
  out.d = records.front().spec.povm.dim();
  Eigen::Index outcomes = 0;
  for (const MeasurementRecord& r : records) {
    if (r.spec.povm.dim() != out.d) throw Error("measurement records differ in dimension");
    if (r.counts.size() != r.spec.povm.size()) throw Error("record counts do not match its POVM");
    outcomes += static_cast<Eigen::Index>(r.counts.size());
  }
  const Eigen::Index d2 = static_cast<Eigen::Index>(out.d) * out.d;
  out.ops.resize(d2, outcomes);
  out.counts.resize(outcomes);
  out.setting_shots.resize(outcomes);
  Eigen::Index k = 0;
  for (const MeasurementRecord& r : records) {
    out.setting_start.push_back(static_cast<int>(k));
    double shots = 0.0;
    for (std::int64_t c : r.counts) {
      if (c < 0) throw Error("negative outcome count");
      shots += static_cast<double>(c);
    }
    for (std::size_t j = 0; j < r.counts.size(); ++j, ++k) {
      out.ops.col(k) = Eigen::Map<const Eigen::VectorXcd>(r.spec.povm.elements[j].data(), d2);
      out.counts(k) = static_cast<double>(r.counts[j]);
      out.setting_shots(k) = shots;
    }
    out.total += shots;
  }
  out.setting_start.push_back(static_cast<int>(k));
  if (out.total <= 0.0) throw Error("measurement records contain no counts");
  return out;
}

RealVector probabilities(const Outcomes& o, const ComplexMatrix& rho) {
  const Eigen::Map<const Eigen::VectorXcd> v(rho.data(), rho.size());
  return (o.ops.adjoint() * v).real();
}

double log_likelihood(const Outcomes& o, const RealVector& probs) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (o.counts(k) == 0.0) continue;
    if (!(probs(k) > 0.0)) return -std::numeric_limits<double>::infinity();
    sum += o.counts(k) * std::log(probs(k));
  }
  return sum;
}

/// R = sum_k n_k / (N p_k) P_k.
ComplexMatrix likelihood_operator(const Outcomes& o, const RealVector& probs) {
  Eigen::VectorXcd coeff(probs.size());
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    coeff(k) = o.counts(k) == 0.0 ? 0.0 : o.counts(k) / (o.total * probs(k));
  }
  const Eigen::VectorXcd r = o.ops * coeff;
  return Eigen::Map<const ComplexMatrix>(r.data(), o.d, o.d);
}

ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Orthonormal Hermitian basis coordinates: diagonal entries, then sqrt(2) Re and
// sqrt(2) Im of each upper off-diagonal entry.
RealVector to_params(const ComplexMatrix& m) {
  const int d = static_cast<int>(m.rows());
  RealVector x(d * d);
  int i = 0;
  for (int a = 0; a < d; ++a) x(i++) = m(a, a).real();
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      x(i++) = std::sqrt(2.0) * m(a, b).real();
      x(i++) = std::sqrt(2.0) * m(a, b).imag();
    }
  return x;
}

ComplexMatrix from_params(const RealVector& x, int d) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  int i = 0;
  for (int a = 0; a < d; ++a) m(a, a) = x(i++);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      const Complex v(x(i), x(i + 1));
      i += 2;
      m(a, b) = v / std::sqrt(2.0);
      m(b, a) = std::conj(v) / std::sqrt(2.0);
    }
  return m;
}

/// Euclidean projection onto density matrices: eigenvalues onto the simplex.
ComplexMatrix project_to_states(const ComplexMatrix& x) {
  const HermitianEigen e = eig_hermitian(hermitize(x));
  return from_spectrum(project_to_simplex(e.values), e.vectors);
}

struct LinearModel {
  Eigen::MatrixXd design;  // rows: outcomes, cols: Hermitian coordinates
  RealVector frequencies;
  RealVector weights;
};

LinearModel linear_model(const Outcomes& o) {
  LinearModel m;
  const Eigen::Index k = o.ops.cols();
  m.design.resize(k, static_cast<Eigen::Index>(o.d) * o.d);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Map<const ComplexMatrix> p(o.ops.col(j).data(), o.d, o.d);
    m.design.row(j) = to_params(p).transpose();
  }
  m.frequencies = o.counts.cwiseQuotient(o.setting_shots.cwiseMax(1e-300));
  m.weights = o.setting_shots;
  return m;
}

RealVector solve_complete(const Eigen::MatrixXd& design, const RealVector& rhs, int d) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  cod.setThreshold(1e-10);
  if (cod.rank() < d * d) {
    throw Error("measurements are not informationally complete (design rank " + std::to_string(cod.rank()) +
                " < " + std::to_string(d * d) + ")");
  }
  return cod.solve(rhs);
}

EstimatorReport finish(const Dims& dims, ComplexMatrix rho, int rank, int iterations, bool converged) {
  EstimatorReport report{make_density_matrix(dims, hermitize(rho), tol::kEstimatorOutput), rank, iterations,
                         converged, {}};
  return report;
}

int numerical_rank(const ComplexMatrix& rho) {
  const RealVector values = eig_hermitian(rho).values;
  return std::max<int>(1, static_cast<int>((values.array() > 1e-12).count()));
}

void check_dims(const Outcomes& o, const Dims& dims) {
  if (total_dim(dims) != o.d) throw Error("estimator dims do not match the measurement dimension");
}

}  // namespace

double log_likelihood(const ComplexMatrix& rho, std::span<const MeasurementRecord> records) {
  const Outcomes o = flatten(records);
  if (rho.rows() != o.d) throw Error("log_likelihood: dimension mismatch");
  return log_likelihood(o, probabilities(o, rho));
}

EstimatorReport ppi_frequencies(std::span<const Povm> povms, std::span<const RealVector> frequencies,
                                const Dims& dims) {
  if (povms.size() != frequencies.size() || povms.empty()) throw Error("ppi: need one frequency vector per POVM");
  const int d = total_dim(dims);
  Eigen::Index rows = 0;
  for (std::size_t j = 0; j < povms.size(); ++j) {
    if (povms[j].dim() != d) throw Error("ppi: POVM dimension mismatch");
    if (static_cast<std::size_t>(frequencies[j].size()) != povms[j].size()) {
      throw Error("ppi: frequency vector length does not match its POVM");
    }
    rows += frequencies[j].size();
  }
  Eigen::MatrixXd design(rows, d * d);
  RealVector f(rows);
  Eigen::Index k = 0;
  for (std::size_t j = 0; j < povms.size(); ++j)
    for (std::size_t i = 0; i < povms[j].size(); ++i, ++k) {
      design.row(k) = to_params(povms[j].elements[i]).transpose();
      f(k) = frequencies[j](static_cast<Eigen::Index>(i));
    }
  const ComplexMatrix x = from_params(solve_complete(design, f, d), d);
  const ComplexMatrix rho = project_to_states(x);
  return finish(dims, rho, numerical_rank(rho), 1, true);
}

EstimatorReport ppi(std::span<const MeasurementRecord> records, const Dims& dims) {
  const Outcomes o = flatten(records);
  check_dims(o, dims);
  const LinearModel m = linear_model(o);
  const ComplexMatrix rho = project_to_states(from_params(solve_complete(m.design, m.frequencies, o.d), o.d));
  return finish(dims, rho, numerical_rank(rho), 1, true);
}

EstimatorReport frls(std::span<const MeasurementRecord> records, const Dims& dims) {
  constexpr int kFrlsIterations = 20000;
  const Outcomes o = flatten(records);
  check_dims(o, dims);
  const int d = o.d;
  const LinearModel m = linear_model(o);
  const RealVector x_ppi = solve_complete(m.design, m.frequencies, d);

  const Eigen::MatrixXd weighted = m.weights.asDiagonal() * m.design;
  const Eigen::MatrixXd hessian = 2.0 * m.design.transpose() * weighted;
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hessian).eigenvalues().maxCoeff();
  const RealVector linear_term = 2.0 * weighted.transpose() * m.frequencies;

  auto objective = [&](const RealVector& x) {
    const RealVector r = m.design * x - m.frequencies;
    return r.dot(m.weights.cwiseProduct(r));
  };
  auto gradient = [&](const RealVector& x) -> RealVector { return hessian * x - linear_term; };
  auto project = [&](const RealVector& x) { return to_params(project_to_states(from_params(x, d))); };

  RealVector x = project(x_ppi);
  RealVector y = x;
  double t = 1.0;
  RealVector best = x;
  double best_value = objective(x);
  double previous = best_value;
  bool converged = false;
  int it = 0;
  for (; it < kFrlsIterations; ++it) {
    const RealVector x_next = project(y - gradient(y) / lipschitz);
    const double value = objective(x_next);
    if (value < best_value) {
      best_value = value;
      best = x_next;
    }
    const double kkt = (x_next - project(x_next - gradient(x_next) / lipschitz)).cwiseAbs().maxCoeff();
    if (kkt <= kStationarity) {
      converged = true;
      x = x_next;
      break;
    }
    if (value > previous) {
      // Momentum restart.
      t = 1.0;
      y = x_next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x_next + ((t - 1.0) / t_next) * (x_next - x);
      t = t_next;
    }
    previous = value;
    x = x_next;
  }
  const ComplexMatrix rho = from_params(converged && objective(x) <= best_value ? x : best, d);
  return finish(dims, rho, numerical_rank(rho), it + 1, converged);
}

namespace {

/// log L(p + dp) - log L(p), accurate when dp is tiny; -inf if infeasible.
double likelihood_gain(const Outcomes& o, const RealVector& probs, const RealVector& dp) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (o.counts(k) == 0.0) continue;
    if (!(probs(k) + dp(k) > 0.0)) return -std::numeric_limits<double>::infinity();
    sum += o.counts(k) * std::log1p(dp(k) / probs(k));
  }
  return sum;
}

// Trace rounding, multiplied by large counts, would swamp the likelihood changes.
ComplexMatrix traceless(const ComplexMatrix& m) {
  return m - (m.trace() / static_cast<double>(m.rows())) * ComplexMatrix::Identity(m.rows(), m.cols());
}

double stationarity(const Outcomes& o, const ComplexMatrix& rho, const RealVector& probs) {
  return (likelihood_operator(o, probs) * rho - rho).cwiseAbs().maxCoeff();
}

}  // namespace

EstimatorReport frml(std::span<const MeasurementRecord> records, const Dims& dims) {
  // Diluted fixed point first. Near the boundary of the state space it slows to a
  // crawl, so it hands over to monotone accelerated projected gradient ascent.
  constexpr int kFixedPointIterations = 200;
  // Tighter than the reported criterion so noiseless data lands on the truth.
  constexpr double kPolishedStationarity = 1e-10;
  const Outcomes o = flatten(records);
  check_dims(o, dims);
  const int d = o.d;
  ComplexMatrix rho = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  RealVector probs = probabilities(o, rho);
  double value = log_likelihood(o, probs);
  double step = 1.0;
  int it = 0;
  for (; it < kFixedPointIterations; ++it) {
    const ComplexMatrix r = likelihood_operator(o, probs);
    // Small R rho - rho does not rule out a missed boundary face; the
    // gradient phase below settles that.
    if ((r * rho - rho).cwiseAbs().maxCoeff() <= kPolishedStationarity) break;
    ComplexMatrix target = hermitize(r * rho * r);
    target /= target.trace().real();
    bool improved = false;
    while (step > 1e-12) {
      ComplexMatrix candidate = (1.0 - step) * rho + step * target;
      const RealVector cand_probs = probabilities(o, candidate);
      const double cand_value = log_likelihood(o, cand_probs);
      if (cand_value >= value) {
        rho = std::move(candidate);
        probs = cand_probs;
        value = cand_value;
        improved = true;
        step = std::min(1.0, 2.0 * step);
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }

  // Likelihood changes are computed from probability differences; near the
  // optimum they sit far below the resolution of the likelihood itself.
  ComplexMatrix prev = rho, y = rho;
  RealVector y_probs = probs;
  double theta = 1.0, lr = 1.0;
  int rejected = 0;
  for (; it < kMaxIterations; ++it) {
    const ComplexMatrix grad = hermitize(likelihood_operator(o, y_probs));
    lr *= 2.0;
    ComplexMatrix z;
    for (int tries = 0; tries < 60; ++tries, lr *= 0.5) {
      z = project_to_states(y + lr * grad);
      z /= z.trace().real();
      const ComplexMatrix delta = traceless(z - y);
      const double gain = likelihood_gain(o, y_probs, probabilities(o, delta));
      const double model = o.total * ((grad.cwiseProduct(delta.conjugate())).sum().real() -
                                      0.5 * delta.squaredNorm() / lr);
      if (gain >= model) break;
    }
    const ComplexMatrix step_delta = traceless(z - rho);
    const double moved = step_delta.cwiseAbs().maxCoeff();
    prev = rho;
    if (likelihood_gain(o, probs, probabilities(o, step_delta)) >= 0.0) {
      rho = z;
      probs = probabilities(o, rho);
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      y = rho + ((theta - 1.0) / theta_next) * (rho - prev);
      theta = theta_next;
      rejected = 0;
    } else {
      // Rejected step: keep the iterate, drop the momentum. A rejected plain
      // gradient step means rounding has the last word.
      if (++rejected == 2) break;
      y = rho;
      theta = 1.0;
    }
    y_probs = probabilities(o, y);
    if (!std::isfinite(likelihood_gain(o, probs, y_probs - probs))) {
      y = rho;
      y_probs = probs;
      theta = 1.0;
    }
    if (moved <= 1e-15 || (moved <= kPolishedStationarity && stationarity(o, rho, probs) <= kPolishedStationarity)) break;
  }
  const bool converged = stationarity(o, rho, probs) <= kStationarity;
  return finish(dims, rho, numerical_rank(rho), it, converged);
}

namespace {

/// Starting factor: top-r part of the pseudo-inversion estimate, eigenvalues floored.
ComplexMatrix initial_factor(const Outcomes& o, const Dims& dims, int rank,
                             std::span<const MeasurementRecord> records) {
  const int d = o.d;
  ComplexMatrix c = ComplexMatrix::Zero(d, rank);
  try {
    const HermitianEigen e = eig_hermitian(ppi(records, dims).estimate.matrix);
    for (int k = 0; k < rank; ++k) c.col(k) = e.vectors.col(k) * std::sqrt(std::max(e.values(k), 1e-3));
  } catch (const Error&) {
    for (int k = 0; k < rank; ++k) c(k, k) = 1.0;
  }
  return c / c.norm();
}

}  // namespace

EstimatorReport trml(std::span<const MeasurementRecord> records, const Dims& dims, int rank) {
  const Outcomes o = flatten(records);
  check_dims(o, dims);
  const int d = o.d;
  if (rank < 1 || rank > d) throw Error("trml: rank must lie in [1, " + std::to_string(d) + "]");

  ComplexMatrix c = initial_factor(o, dims, rank, records);
  RealVector probs = probabilities(o, c * c.adjoint());
  double value = log_likelihood(o, probs);
  double step = 1.0;
  bool converged = false;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const ComplexMatrix rc = likelihood_operator(o, probs) * c;
    // Stationary points of the likelihood on Tr cc^dagger = 1 satisfy R c = c.
    if ((rc - c).cwiseAbs().maxCoeff() <= kStationarity) {
      converged = true;
      break;
    }
    bool improved = false;
    while (step > 1e-12) {
      ComplexMatrix candidate = c + step * (rc - c);
      candidate /= candidate.norm();
      const RealVector cand_probs = probabilities(o, candidate * candidate.adjoint());
      const double cand_value = log_likelihood(o, cand_probs);
      if (cand_value >= value) {
        c = std::move(candidate);
        probs = cand_probs;
        value = cand_value;
        improved = true;
        step = std::min(4.0, 1.5 * step);
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return finish(dims, c * c.adjoint(), rank, it, converged);
}

namespace {

struct Chi2Cells {
  double statistic = 0.0;
  int free_frequencies = 0;
};

Chi2Cells chi2_cells(const Outcomes& o, const ComplexMatrix& rho_fit) {
  const RealVector probs = probabilities(o, rho_fit);
  Chi2Cells cells;
  for (std::size_t s = 0; s + 1 < o.setting_start.size(); ++s) {
    const int begin = o.setting_start[s], end = o.setting_start[s + 1];
    const double shots = o.setting_shots(begin);
    std::vector<double> observed, expected;
    int largest = -1;
    for (int k = begin; k < end; ++k) {
      observed.push_back(o.counts(k));
      expected.push_back(shots * std::max(probs(k), 0.0));
      if (largest < 0 || expected.back() > expected[largest]) largest = static_cast<int>(expected.size()) - 1;
    }
    // Cells with vanishing expectation are merged into the largest cell of the setting.
    int kept = 0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (static_cast<int>(k) != largest && expected[k] < 1e-9) {
        observed[largest] += observed[k];
        expected[largest] += expected[k];
        expected[k] = -1.0;
      }
    }
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (expected[k] < 0.0) continue;
      ++kept;
      if (expected[k] <= 0.0) {
        if (observed[k] > 0.0) cells.statistic = std::numeric_limits<double>::infinity();
        continue;
      }
      const double diff = observed[k] - expected[k];
      cells.statistic += diff * diff / expected[k];
    }
    cells.free_frequencies += kept - 1;
  }
  return cells;
}

}  // namespace

int chi2_dof(std::span<const MeasurementRecord> records, const ComplexMatrix& rho_fit, int rank) {
  const Outcomes o = flatten(records);
  return chi2_cells(o, rho_fit).free_frequencies - nu(o.d, rank);
}

double chi2_pvalue(std::span<const MeasurementRecord> records, const ComplexMatrix& rho_fit, int rank) {
  const Outcomes o = flatten(records);
  if (rho_fit.rows() != o.d) throw Error("chi2_pvalue: dimension mismatch");
  const Chi2Cells cells = chi2_cells(o, rho_fit);
  const int dof = cells.free_frequencies - nu(o.d, rank);
  if (dof <= 0) return 1.0;
  if (std::isinf(cells.statistic)) return 0.0;
  return chi2_sf(cells.statistic, dof);
}

EstimatorReport arml(std::span<const MeasurementRecord> records, const Dims& dims, double alpha) {
  const int d = total_dim(dims);
  std::vector<double> pvalues;
  std::optional<EstimatorReport> chosen;
  for (int r = 1; r <= d; ++r) {
    EstimatorReport fit = trml(records, dims, r);
    const double p = chi2_pvalue(records, fit.estimate.matrix, r);
    pvalues.push_back(p);
    if (r > 1 && p < pvalues[pvalues.size() - 2]) break;  // keep the previous rank
    chosen = std::move(fit);
    if (p >= alpha) break;
  }
  chosen->pvalues = std::move(pvalues);
  return std::move(*chosen);
}

void validate_estimator_id(std::string_view id) {
  if (id == "ppi" || id == "frls" || id == "frml" || id == "arml") return;
  if (id.starts_with("trml:")) {
    const std::string_view digits = id.substr(5);
    int rank = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), rank);
    if (ec == std::errc() && end == digits.data() + digits.size() && rank >= 1) return;
    throw Error("trml needs a positive integer rank, e.g. trml:1; got '" + std::string(id) + "'");
  }
  if (id == "trml") throw Error("trml needs a rank argument, e.g. trml:1");
  throw Error("unknown estimator '" + std::string(id) + "' (expected ppi, frls, frml, trml:<r> or arml)");
}

Estimator make_estimator(std::string_view id) {
  validate_estimator_id(id);
  if (id == "ppi") return [](auto records, const Dims& dims) { return ppi(records, dims); };
  if (id == "frls") return [](auto records, const Dims& dims) { return frls(records, dims); };
  if (id == "frml") return [](auto records, const Dims& dims) { return frml(records, dims); };
  if (id == "arml") return [](auto records, const Dims& dims) { return arml(records, dims); };
  const int rank = std::stoi(std::string(id.substr(5)));
  return [rank](auto records, const Dims& dims) { return trml(records, dims, rank); };
}

}  // namespace qtb
