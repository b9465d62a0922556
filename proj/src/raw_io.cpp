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

#include "qtb/raw_io.hpp"

#include <fstream>
#include <istream>

#include <json.hpp>

namespace qtb {

using nlohmann::ordered_json;

std::string raw_line(const RawHeader& header, const RunResult& run) {
  ordered_json j;
  j["test"] = std::string(to_string(header.test));
  j["dims"] = header.dims;
  j["protocol"] = header.method.protocol;
  j["estimator"] = header.method.estimator;
  j["N"] = run.n_total;
  j["run"] = run.run_index;
  j["seed"] = run.seed;
  if (run.failed)
    j["fidelity"] = nullptr;
  else
    j["fidelity"] = run.fidelity;
  j["M"] = run.bases_count;
  j["t_protocol_s"] = run.t_protocol;
  j["t_estimator_s"] = run.t_estimator;
  j["failed"] = run.failed;
  return j.dump();
}

RawFile read_raw(std::istream& in) {
  RawFile file;
  bool first = true;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const ordered_json j = ordered_json::parse(line);
      RawHeader h;
      h.test = parse_test_kind(j.at("test").get<std::string>());
      h.dims = j.at("dims").get<Dims>();
      h.method.protocol = j.at("protocol").get<std::string>();
      h.method.estimator = j.at("estimator").get<std::string>();
      h.method = parse_method(h.method.id());
      if (first) {
        file.header = h;
        first = false;
      } else if (h.test != file.header.test || h.dims != file.header.dims ||
                 h.method.id() != file.header.method.id()) {
        throw Error("mixes results of different campaigns");
      }
      RunResult r;
      r.n_total = j.at("N").get<std::int64_t>();
      r.run_index = j.at("run").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.failed = j.at("failed").get<bool>();
      if (!r.failed) r.fidelity = j.at("fidelity").get<double>();
      r.bases_count = j.at("M").get<std::int64_t>();
      r.t_protocol = j.at("t_protocol_s").get<double>();
      r.t_estimator = j.at("t_estimator_s").get<double>();
      file.runs.push_back(r);
    } catch (const std::exception& e) {
      throw Error("raw line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (first) throw Error("raw file holds no results");
  return file;
}

RawFile read_raw_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return read_raw(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace qtb
