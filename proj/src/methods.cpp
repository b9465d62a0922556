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

#include "qtb/methods.hpp"

#include <algorithm>
#include <array>

namespace qtb {
namespace {

constexpr std::array kProtocols{"mub", "fmub", "pauli", "amub", "fo", "fomub"};

}  // namespace

std::string MethodSpec::id() const { return protocol == "sgqt" ? protocol : protocol + "+" + estimator; }

bool MethodSpec::factorized() const {
  return protocol == "fmub" || protocol == "pauli" || protocol == "fo" || protocol == "fomub";
}

bool MethodSpec::adaptive() const {
  return protocol == "amub" || protocol == "fo" || protocol == "fomub" || protocol == "sgqt";
}

MethodSpec parse_method(std::string_view id) {
  if (id == "sgqt") return MethodSpec{"sgqt", "sgqt"};
  const auto plus = id.find('+');
  if (plus == std::string_view::npos) {
    throw Error("method must be 'protocol+estimator' or 'sgqt'; got '" + std::string(id) + "'");
  }
  MethodSpec spec{std::string(id.substr(0, plus)), std::string(id.substr(plus + 1))};
  if (std::find(kProtocols.begin(), kProtocols.end(), spec.protocol) == kProtocols.end()) {
    throw Error("unknown protocol '" + spec.protocol + "' (expected mub, fmub, pauli, amub, fo or fomub)");
  }
  validate_estimator_id(spec.estimator);
  return spec;
}

void check_compatible(const MethodSpec& method, const Dims& dims) {
  const int d = total_dim(dims);
  if (d < 2) throw Error("total dimension must be at least 2");
  const std::string& p = method.protocol;
  if (p == "mub" || p == "amub") {
    if (!mub_supported(d)) {
      throw Error(p + " needs a total dimension in {2, 3, 4, 5, 7, 8, 9}; got " + std::to_string(d));
    }
  }
  if (p == "fmub" || p == "fomub") {
    for (int dj : dims)
      if (!mub_supported(dj)) {
        throw Error(p + " needs subsystem dimensions in {2, 3, 4, 5, 7, 8, 9}; got " + std::to_string(dj));
      }
  }
  if (p == "pauli") {
    for (int dj : dims)
      if (dj != 2) throw Error("pauli needs a qubit register");
  }
  if ((p == "fo" || p == "fomub") && dims.size() < 2) {
    throw Error(p + " needs at least two subsystems");
  }
  if (method.estimator.starts_with("trml:")) {
    const int rank = std::stoi(method.estimator.substr(5));
    if (rank > d) throw Error("trml rank " + std::to_string(rank) + " exceeds the dimension " + std::to_string(d));
  }
}

MethodInstance instantiate(const MethodSpec& method, const Dims& dims, const SgqtParams& sgqt, Rng rng) {
  check_compatible(method, dims);
  if (method.protocol == "sgqt") {
    SgqtMethod m = sgqt_method(dims, sgqt, std::move(rng));
    return {std::move(m.protocol), std::move(m.estimator)};
  }
  Estimator estimator = make_estimator(method.estimator);
  const std::string& p = method.protocol;
  std::unique_ptr<ProtocolHandler> handler;
  if (p == "mub") handler = std::make_unique<StaticProtocol>(mub_protocol(dims));
  else if (p == "fmub") handler = std::make_unique<StaticProtocol>(fmub_protocol(dims));
  else if (p == "pauli") handler = std::make_unique<StaticProtocol>(pauli_protocol(static_cast<int>(dims.size())));
  else if (p == "amub") handler = amub_handler(dims, estimator);
  else if (p == "fo") handler = fo_handler(dims, estimator, std::move(rng));
  else if (p == "fomub") handler = fomub_handler(dims, estimator, std::move(rng));
  return {std::move(handler), std::move(estimator)};
}

}  // namespace qtb
