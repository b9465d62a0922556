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

#include <memory>
#include <string>
#include <string_view>

#include "qtb/estimators.hpp"
#include "qtb/protocols.hpp"
#include "qtb/sgqt.hpp"

namespace qtb {

/// A tomography method: "protocol+estimator" (e.g. "fmub+trml:1") or "sgqt".
struct MethodSpec {
  std::string protocol;
  std::string estimator;

  /// Canonical identifier, the inverse of parse_method.
  std::string id() const;
  bool factorized() const;
  bool adaptive() const;
};

/// Parses and validates identifiers; throws Error naming the offending part.
MethodSpec parse_method(std::string_view id);

/// Throws when the method cannot run on `dims` (unsupported MUB dimension,
/// non-qubit Pauli register, single-subsystem FO, rank above d, ...).
void check_compatible(const MethodSpec& method, const Dims& dims);

/// Fresh per-run handler pair.
struct MethodInstance {
  std::unique_ptr<ProtocolHandler> protocol;
  Estimator estimator;
};

MethodInstance instantiate(const MethodSpec& method, const Dims& dims, const SgqtParams& sgqt, Rng rng);

}  // namespace qtb
