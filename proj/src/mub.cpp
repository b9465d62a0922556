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

// Complete MUB sets for prime-power dimensions.
//
// The generalized Pauli operators X(a)Z(b), a, b in F_p^n, split into d+1
// maximal commuting classes: the Z class and, for every field element s,
// {X(a)Z(M_s a)} with (M_s)_ij = tr(s alpha_i alpha_j). The common eigenbases
// of the classes are mutually unbiased.
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "qtb/protocols.hpp"

namespace qtb {
namespace {

struct FieldSpec {
  int p;
  int n;
  std::vector<int> modulus;  // monic irreducible, low order first, length n+1
};

FieldSpec field_for(int d) {
  switch (d) {
    case 2: return {2, 1, {0, 1}};
    case 3: return {3, 1, {0, 1}};
    case 5: return {5, 1, {0, 1}};
    case 7: return {7, 1, {0, 1}};
    case 4: return {2, 2, {1, 1, 1}};     // x^2 + x + 1
    case 8: return {2, 3, {1, 1, 0, 1}};  // x^3 + x + 1
    case 9: return {3, 2, {1, 0, 1}};     // x^2 + 1
    default: break;
  }
  throw Error("MUBs are only available for d in {2, 3, 4, 5, 7, 8, 9}; got d = " + std::to_string(d));
}

/// GF(p^n) elements as coefficient vectors (low order first).
class GaloisField {
 public:
  explicit GaloisField(FieldSpec spec) : f_(std::move(spec)) {}

  int size() const { return static_cast<int>(std::pow(f_.p, f_.n)); }

  std::vector<int> element(int index) const {
    std::vector<int> c(f_.n);
    for (int i = 0; i < f_.n; ++i) {
      c[i] = index % f_.p;
      index /= f_.p;
    }
    return c;
  }

  std::vector<int> mul(const std::vector<int>& a, const std::vector<int>& b) const {
    std::vector<int> prod(2 * f_.n - 1, 0);
    for (int i = 0; i < f_.n; ++i)
      for (int j = 0; j < f_.n; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % f_.p;
    for (int k = 2 * f_.n - 2; k >= f_.n; --k) {
      const int c = prod[k];
      if (c == 0) continue;
      for (int i = 0; i <= f_.n; ++i) {
        prod[k - f_.n + i] = ((prod[k - f_.n + i] - c * f_.modulus[i]) % f_.p + f_.p) % f_.p;
      }
    }
    prod.resize(f_.n);
    return prod;
  }

  std::vector<int> add(const std::vector<int>& a, const std::vector<int>& b) const {
    std::vector<int> s(f_.n);
    for (int i = 0; i < f_.n; ++i) s[i] = (a[i] + b[i]) % f_.p;
    return s;
  }

  /// Absolute trace y + y^p + ... + y^{p^{n-1}}, an element of F_p.
  int trace(const std::vector<int>& y) const {
    std::vector<int> acc(f_.n, 0), power = y;
    for (int i = 0; i < f_.n; ++i) {
      acc = add(acc, power);
      std::vector<int> next = power;
      for (int k = 1; k < f_.p; ++k) next = mul(next, power);
      power = next;
    }
    for (int i = 1; i < f_.n; ++i)
      if (acc[i] != 0) throw Error("field trace left the prime subfield");
    return acc[0];
  }

  std::vector<int> monomial(int i) const {
    std::vector<int> c(f_.n, 0);
    c[i] = 1;
    return c;
  }

  int p() const { return f_.p; }
  int n() const { return f_.n; }

 private:
  FieldSpec f_;
};

/// X(a)Z(b) on n qudits of dimension p; most significant digit first.
ComplexMatrix weyl_operator(int p, int n, const std::vector<int>& a, const std::vector<int>& b) {
  const int d = static_cast<int>(std::pow(p, n));
  const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / p);
  ComplexMatrix op = ComplexMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    std::vector<int> digits(n);
    int rest = j;
    for (int k = n - 1; k >= 0; --k) {
      digits[k] = rest % p;
      rest /= p;
    }
    int phase = 0, target = 0;
    for (int k = 0; k < n; ++k) {
      phase += b[k] * digits[k];
      target = target * p + (digits[k] + a[k]) % p;
    }
    op(target, j) = std::pow(omega, phase % p);
  }
  return op;
}

std::vector<ComplexMatrix> build_mub(int d) {
  const GaloisField field(field_for(d));
  const int p = field.p(), n = field.n();
  std::vector<ComplexMatrix> bases;
  bases.push_back(ComplexMatrix::Identity(d, d));

  const Complex phase = std::polar(1.0, 0.3);
  for (int s_index = 0; s_index < field.size(); ++s_index) {
    const std::vector<int> s = field.element(s_index);
    // Symmetric form (M_s)_ij = tr(s x^i x^j).
    std::vector<std::vector<int>> form(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        form[i][j] = field.trace(field.mul(s, field.mul(field.monomial(i), field.monomial(j))));

    // A generic Hermitian combination of the class generators has the class's
    // joint eigenbasis as its nondegenerate eigenbasis.
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    double weight = 1.0;
    for (int g = 0; g < n; ++g) {
      std::vector<int> a(n, 0), b(n, 0);
      a[g] = 1;
      for (int i = 0; i < n; ++i) b[i] = form[i][g];
      const ComplexMatrix op = weyl_operator(p, n, a, b);
      h += weight * (phase * op + std::conj(phase) * op.adjoint());
      weight *= 6.0;
    }
    const HermitianEigen e = eig_hermitian(h);
    for (int k = 0; k + 1 < d; ++k) {
      if (e.values(k) - e.values(k + 1) < 1e-6) throw Error("MUB construction hit a degenerate spectrum");
    }
    bases.push_back(e.vectors);
  }
  return bases;
}

}  // namespace

bool mub_supported(int d) {
  static constexpr std::array kSupported{2, 3, 4, 5, 7, 8, 9};
  return std::find(kSupported.begin(), kSupported.end(), d) != kSupported.end();
}

std::vector<ComplexMatrix> mub_bases(int d) {
  if (!mub_supported(d)) field_for(d);  // throws with the supported set
  static const std::map<int, std::vector<ComplexMatrix>> cache = [] {
    std::map<int, std::vector<ComplexMatrix>> m;
    for (int dim : {2, 3, 4, 5, 7, 8, 9}) m.emplace(dim, build_mub(dim));
    return m;
  }();
  return cache.at(d);
}

}  // namespace qtb
