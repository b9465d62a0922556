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

#include "qtb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "qtb/qcore.hpp"

namespace qtb {

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw Error("percentile: empty input");
  if (q < 0.0 || q > 1.0) throw Error("percentile: q must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

int nu(int d, int r) {
  if (d < 1 || r < 1 || r > d) throw Error("nu: rank must lie in [1, d]");
  return (2 * d - r) * r - 1;
}

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 10000;

double gamma_series(double a, double x) {
  double term = 1.0 / a, sum = term;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / kTiny, d = 1.0 / b, h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw Error("regularized_gamma_p: invalid arguments");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw Error("regularized_gamma_q: invalid arguments");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - gamma_series(a, x) : gamma_continued_fraction(a, x);
}

double chi2_cdf(double x, double dof) { return x <= 0.0 ? 0.0 : regularized_gamma_p(0.5 * dof, 0.5 * x); }

double chi2_sf(double x, double dof) { return x <= 0.0 ? 1.0 : regularized_gamma_q(0.5 * dof, 0.5 * x); }

double chi2_icdf(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) throw Error("chi2_icdf: p must lie in (0, 1)");
  if (dof < 1.0) throw Error("chi2_icdf: dof must be at least 1");
  if (dof == 2.0) return -2.0 * std::log1p(-p);
  double lo = 0.0, hi = std::max(1.0, dof);
  while (chi2_cdf(hi, dof) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(mid, dof) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double optimal_parameter_variance(double n_samples, int d, int r) {
  if (n_samples <= 0.0) throw Error("sample size must be positive");
  if (d < 2) throw Error("dimension must be at least 2");
  return nu(d, r) / (4.0 * n_samples * (d - 1));
}

double lower_bound_infidelity_p95(double n_samples, int d, int r) {
  return optimal_parameter_variance(n_samples, d, r) * chi2_icdf(0.95, nu(d, r));
}

double lower_bound_NB(double fidelity_target, int d, int r) {
  if (!(fidelity_target > 0.0 && fidelity_target < 1.0)) throw Error("F_B must lie in (0, 1)");
  if (d < 2) throw Error("dimension must be at least 2");
  const int v = nu(d, r);
  return v * chi2_icdf(0.95, v) / (4.0 * (d - 1) * (1.0 - fidelity_target));
}

double efficiency(double mean_infidelity, double n_samples, int d, int r) {
  if (mean_infidelity <= 0.0) throw Error("efficiency: mean infidelity must be positive");
  const double v = nu(d, r);
  return v * v / (4.0 * n_samples * (d - 1) * mean_infidelity);
}

namespace {

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

namespace {

// The kernel h(hi, lo) = ((hi - q) - (q - lo)) / (hi - lo) increases in both
// arguments, so with both sides sorted ascending the entries <= t form a
// staircase that two pointers can walk in linear time.
struct KernelGrid {
  std::vector<double> above, below;
  double q = 0.0;

  double h(double hi, double lo) const { return ((hi - q) - (q - lo)) / (hi - lo); }

  // Number of kernel entries <= t, and the largest of them.
  std::pair<std::size_t, double> count_le(double t) const {
    std::size_t count = 0;
    double largest = -std::numeric_limits<double>::infinity();
    std::size_t j = below.size();
    for (double hi : above) {
      while (j > 0 && h(hi, below[j - 1]) > t) --j;
      count += j;
      if (j > 0) largest = std::max(largest, h(hi, below[j - 1]));
    }
    return {count, largest};
  }

  // k-th smallest entry, zero-based.
  double select(std::size_t k) const {
    double lo = -1.0, hi = 1.0;
    while (true) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (count_le(mid).first >= k + 1)
        hi = mid;
      else
        lo = mid;
    }
    return count_le(hi).second;
  }
};

}  // namespace

double medcouple(std::span<const double> sample) {
  if (sample.size() < 3) throw Error("medcouple: need at least three values");
  std::vector<double> copy(sample.begin(), sample.end());
  KernelGrid grid;
  grid.q = median_in_place(copy);
  for (double x : sample) {
    if (x < grid.q) grid.below.push_back(x);
    else if (x > grid.q) grid.above.push_back(x);
  }
  if (grid.below.empty() || grid.above.empty()) return 0.0;
  std::sort(grid.below.begin(), grid.below.end());
  std::sort(grid.above.begin(), grid.above.end());
  const std::size_t n = grid.below.size() * grid.above.size();
  const double m = n % 2 ? grid.select(n / 2) : 0.5 * (grid.select(n / 2 - 1) + grid.select(n / 2));
  return std::clamp(m, -1.0, 1.0);
}

Fence adjusted_fence(std::span<const double> sample) {
  if (sample.size() < 4) throw Error("outlier analysis needs at least four values");
  const double q1 = percentile(sample, 0.25);
  const double q3 = percentile(sample, 0.75);
  const double iqr = q3 - q1;
  const double mc = medcouple(sample);
  // Mirrored exponents for negative skew.
  const double lower_scale = mc >= 0.0 ? std::exp(-4.0 * mc) : std::exp(-3.0 * mc);
  const double upper_scale = mc >= 0.0 ? std::exp(3.0 * mc) : std::exp(4.0 * mc);
  return Fence{q1 - 1.5 * lower_scale * iqr, q3 + 1.5 * upper_scale * iqr};
}

double outlier_ratio(std::span<const double> sample) {
  const Fence fence = adjusted_fence(sample);
  const auto outside = std::count_if(sample.begin(), sample.end(),
                                     [&](double x) { return x < fence.lower || x > fence.upper; });
  return static_cast<double>(outside) / static_cast<double>(sample.size());
}

namespace {

void check_grid(std::span<const double> ns, std::span<const double> values) {
  if (ns.size() != values.size()) throw Error("interpolation: grid and values differ in length");
  if (ns.size() < 2) throw Error("interpolation: need at least two grid points");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0)) throw Error("interpolation: sample sizes must be positive");
    if (i > 0 && !(ns[i] > ns[i - 1])) throw Error("interpolation: sample sizes must increase");
  }
}

double segment_solve(double x0, double y0, double x1, double y1, double y) {
  if (y1 == y0) return x0;
  return x0 + (y - y0) * (x1 - x0) / (y1 - y0);
}

}  // namespace

InterpolatedN interpolate_NB(std::span<const double> ns, std::span<const double> values, double target) {
  check_grid(ns, values);
  if (!(target > 0.0)) throw Error("interpolate_NB: target infidelity must be positive");
  std::vector<double> x(ns.size()), y(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(values[i] > 0.0)) throw Error("interpolate_NB: percentile values must be positive");
    x[i] = std::log10(ns[i]);
    y[i] = std::log10(values[i]);
  }
  const double t = std::log10(target);
  const std::size_t last = x.size() - 1;

  if (y[0] < t) {
    // Already below the target at the smallest sample size: extend the first segment backwards.
    if (!(y[1] < y[0])) throw Error("interpolate_NB: curve does not decrease at the start of the grid");
    return {std::pow(10.0, segment_solve(x[0], y[0], x[1], y[1], t)), true};
  }
  for (std::size_t i = 0; i < last; ++i) {
    if (y[i] >= t && y[i + 1] <= t) {
      return {std::pow(10.0, segment_solve(x[i], y[i], x[i + 1], y[i + 1], t)), false};
    }
  }
  if (!(y[last] < y[last - 1])) {
    throw Error("interpolate_NB: target not reached and the curve does not decrease at the end of the grid");
  }
  return {std::pow(10.0, segment_solve(x[last - 1], y[last - 1], x[last], y[last], t)), true};
}

double interpolate_at_NB(std::span<const double> ns, std::span<const double> values, double n_b) {
  check_grid(ns, values);
  if (!(n_b > 0.0)) throw Error("interpolate_at_NB: N_B must be positive");
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (ns[i] == n_b) return values[i];
  const double x = std::log10(n_b);
  std::size_t seg = 0;
  while (seg + 2 < ns.size() && x > std::log10(ns[seg + 1])) ++seg;
  const double x0 = std::log10(ns[seg]), x1 = std::log10(ns[seg + 1]);
  const double w = (x - x0) / (x1 - x0);
  return values[seg] + w * (values[seg + 1] - values[seg]);
}

}  // namespace qtb
