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

#include <iosfwd>
#include <string>
#include <vector>

#include "qtb/engine.hpp"

namespace qtb {

/// Identifies the campaign a raw line belongs to.
struct RawHeader {
  TestKind test = TestKind::kRps;
  Dims dims;
  MethodSpec method;
};

struct RawFile {
  RawHeader header;
  std::vector<RunResult> runs;
};

/// One JSON object per line with the fields
/// test, dims, protocol, estimator, N, run, seed, fidelity, M, t_protocol_s, t_estimator_s, failed.
std::string raw_line(const RawHeader& header, const RunResult& run);

/// Throws Error on malformed lines or on lines from different campaigns.
RawFile read_raw(std::istream& in);
RawFile read_raw_file(const std::string& path);

}  // namespace qtb
