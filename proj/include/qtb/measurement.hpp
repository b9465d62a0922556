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

#include <cstdint>
#include <optional>
#include <vector>

#include "qtb/qcore.hpp"

namespace qtb {

enum class MeasurementKind { kPovm, kObservable, kOperator };

/// One measurement setting: positive operators summing to the identity.
struct Povm {
  std::vector<ComplexMatrix> elements;

  int dim() const { return elements.empty() ? 0 : static_cast<int>(elements.front().rows()); }
  std::size_t size() const { return elements.size(); }
};

/// Rank-one projectors onto the columns of an orthonormal basis.
Povm projective_povm(const ComplexMatrix& basis);

/// Throws unless every element is PSD and the elements sum to the identity.
void check_povm(const Povm& povm, double tolerance = tol::kPovmCompleteness);

/// What a protocol handler asks the experiment to do with `shots` fresh copies.
/// Observable and operator measurements are carried as their induced POVMs; the
/// original operator is kept for reference.
struct MeasurementSpec {
  MeasurementKind kind = MeasurementKind::kPovm;
  Povm povm;
  std::optional<ComplexMatrix> operator_matrix;
  std::optional<ComplexMatrix> basis;  // set for projective measurements in an orthonormal basis
  std::int64_t shots = 1;
};

struct MeasurementRecord {
  MeasurementSpec spec;
  std::vector<std::int64_t> counts;
};

}  // namespace qtb
