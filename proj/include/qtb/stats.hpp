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

#include <span>
#include <vector>

namespace qtb {

/// Empirical quantile with linear interpolation between order statistics at
/// rank 1 + q (n - 1).
double percentile(std::span<const double> values, double q = 0.95);

/// Number of independent real parameters of a rank-r state in dimension d: (2d - r) r - 1.
int nu(int d, int r);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

double chi2_cdf(double x, double dof);
/// Upper tail 1 - CDF.
double chi2_sf(double x, double dof);
/// Inverse CDF of the chi-squared distribution.
double chi2_icdf(double p, double dof);

/// d0 = nu / (4 N (d - 1)).
double optimal_parameter_variance(double n_samples, int d, int r);

/// 95th percentile of infidelity of an optimal estimator: d0 * chi2_icdf(0.95, nu).
double lower_bound_infidelity_p95(double n_samples, int d, int r);

/// Sample size at which the optimal 95th percentile reaches 1 - F_B.
double lower_bound_NB(double fidelity_target, int d, int r);

/// eta = nu^2 / (4 N (d - 1) <1 - F>).
double efficiency(double mean_infidelity, double n_samples, int d, int r);

/// Robust skewness: median of ((x+ - Q2) - (Q2 - x-)) / (x+ - x-) over pairs x- < Q2 < x+.
double medcouple(std::span<const double> sample);

struct Fence {
  double lower;
  double upper;
};

/// Skew-adjusted boxplot fence.
Fence adjusted_fence(std::span<const double> sample);

/// Fraction of the sample outside the adjusted fence.
double outlier_ratio(std::span<const double> sample);

struct InterpolatedN {
  double n_b;
  bool extrapolated;
};

/// Solves percentile(N) = target on the log-log piecewise-linear curve through (ns, values).
InterpolatedN interpolate_NB(std::span<const double> ns, std::span<const double> values, double target);

/// Value at N_B, linear in log N; beyond the grid the nearest segment is extended.
double interpolate_at_NB(std::span<const double> ns, std::span<const double> values, double n_b);

}  // namespace qtb
