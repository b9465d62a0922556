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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "qtb/cli.hpp"
#include "qtb/raw_io.hpp"
#include "qtb/report.hpp"
#include "qtb/stats.hpp"

using namespace qtb;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qtbench_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string without_timing(const std::string& text) {
  static const std::regex timing(R"("t_(protocol|estimator)_s":[^,}]*)");
  return std::regex_replace(text, timing, "");
}

}  // namespace

TEST_CASE("argument parsing helpers") {
  CHECK(parse_dims("2,2") == Dims{2, 2});
  CHECK(parse_dims("3") == Dims{3});
  CHECK_THROWS_AS(parse_dims("2,x"), Error);
  CHECK_THROWS_AS(parse_dims(""), Error);
  CHECK(parse_grid("1e3,1e4,20000") == std::vector<std::int64_t>{1000, 10000, 20000});
  CHECK_THROWS_AS(parse_grid("1e3,0.5"), Error);
  const auto kv = parse_config_text("# campaign\ndims = 2,2\n  --method=fmub+frml  # inline\n\nsgqt.a = 2\n");
  REQUIRE(kv.size() == 3);
  CHECK(kv[0] == std::pair<std::string, std::string>{"dims", "2,2"});
  CHECK(kv[1] == std::pair<std::string, std::string>{"method", "fmub+frml"});
  CHECK(kv[2] == std::pair<std::string, std::string>{"sgqt.a", "2"});
  CHECK_THROWS_AS(parse_config_text("dims 2,2\n"), Error);
}

TEST_CASE("lowerbound command") {
  Result r = cli({"lowerbound", "--dims", "2,2", "--test", "rps"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\n6296,6,") != std::string::npos);
  r = cli({"lowerbound", "--dims", "2,2", "--test", "rnp", "--fb", "0.999"});
  CHECK(r.out.find("\n31245,15,") != std::string::npos);
  r = cli({"lowerbound", "--dims", "2", "--test", "rps"});
  CHECK(r.out.find("\n2996,2,") != std::string::npos);
  CHECK(cli({"lowerbound", "--dims", "2", "--test", "nope"}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("analyze writes one line per run and reruns identically") {
  const fs::path dir = scratch("analyze");
  const std::vector<std::string> args{"analyze", "--dims", "2,2", "--test", "rps", "--method", "fmub+trml:1",
                                      "--seed", "7", "--grid", "100,1000,10000", "--runs", "20", "--workers", "1",
                                      "--out", dir.string()};
  Result r = cli(args);
  REQUIRE(r.code == 0);
  const fs::path raw = dir / "raw_rps_2x2_fmub+trml-1.jsonl";
  REQUIRE(fs::exists(raw));
  const auto first = lines(raw);
  CHECK(first.size() == 60);
  const auto j = nlohmann::ordered_json::parse(first[0]);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"test", "dims", "protocol", "estimator", "N", "run", "seed", "fidelity", "M",
                                         "t_protocol_s", "t_estimator_s", "failed"});
  CHECK(j["estimator"] == "trml:1");
  CHECK(j["M"] == 9);

  const std::string before = slurp(raw);
  auto parallel = args;
  parallel[14] = "3";
  REQUIRE(cli(parallel).code == 0);
  CHECK(without_timing(slurp(raw)) == without_timing(before));

  auto fixed = args;
  fixed.push_back("--no-timing");
  REQUIRE(cli(fixed).code == 0);
  const std::string a = slurp(raw);
  fixed[14] = "4";
  REQUIRE(cli(fixed).code == 0);
  CHECK(slurp(raw) == a);
  fs::remove_all(dir);
}

TEST_CASE("invalid configurations fail before writing") {
  const fs::path dir = scratch("invalid");
  for (const std::vector<std::string>& bad :
       {std::vector<std::string>{"--method", "fmub+nope"}, {"--method", "fmub"}, {"--method", "fmub+trml:9"},
        {"--method", "mub+frml", "--dims", "6"}, {"--test", "xyz"}, {"--grid", "1000,100"}, {"--runs", "1"},
        {"--fb", "1.5"}, {"--workers", "0"}}) {
    std::vector<std::string> args{"analyze", "--dims", "2,2", "--test", "rps", "--method", "fmub+frml", "--out",
                                  dir.string()};
    // Later flags would clash with earlier ones in CLI11, so replace in place.
    for (std::size_t i = 0; i + 1 < bad.size(); i += 2) {
      auto it = std::find(args.begin(), args.end(), bad[i]);
      if (it != args.end())
        *(it + 1) = bad[i + 1];
      else {
        args.push_back(bad[i]);
        args.push_back(bad[i + 1]);
      }
    }
    CAPTURE(args);
    const Result r = cli(args);
    CHECK(r.code == 2);
    CHECK(r.err.find("error") != std::string::npos);
    CHECK_FALSE(fs::exists(dir));
  }
  CHECK(cli({"analyze", "--dims", "2,2"}).code == 2);
}

TEST_CASE("config files with flag precedence") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  const fs::path cfg = dir / "campaign.cfg";
  std::ofstream(cfg) << "dims = 2\ntest = rps\nmethod = fmub+frml\ngrid = 100,1000\nruns = 3\nseed = 5\nout = "
                     << (dir / "from_config").string() << "\n";
  Result r = cli({"analyze", "--config", cfg.string(), "--method", "fmub+ppi", "--runs", "4"});
  REQUIRE(r.code == 0);
  const fs::path raw = dir / "from_config" / "raw_rps_2_fmub+ppi.jsonl";
  REQUIRE(fs::exists(raw));
  CHECK(lines(raw).size() == 8);

  std::ofstream(cfg) << "dims = 2\ntest = rps\nmethod = sgqt\ngrid = 1000,2000\nruns = 2\nsgqt.shots = 50\nsgqt.a = 0\n"
                     << "out = " << (dir / "sg").string() << "\n";
  r = cli({"analyze", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  // 50 shots per evaluation: 1000 copies make ten iterations, twenty projectors.
  const auto j = nlohmann::json::parse(lines(dir / "sg" / "raw_rps_2_sgqt.jsonl")[0]);
  CHECK(j["M"] == 20);

  std::ofstream(cfg) << "colour = blue\n";
  CHECK(cli({"analyze", "--config", cfg.string(), "--dims", "2", "--test", "rps", "--method", "fmub+ppi"}).code == 2);
  std::ofstream(cfg) << "sgqt.b = 0\n";
  CHECK(cli({"analyze", "--config", cfg.string(), "--dims", "2", "--test", "rps", "--method", "sgqt", "--out",
             (dir / "never").string()})
            .code == 2);
  CHECK_FALSE(fs::exists(dir / "never"));
  fs::remove_all(dir);
}

TEST_CASE("campaign failures exit with status 1") {
  const fs::path dir = scratch("fail");
  const Result r = cli({"analyze", "--dims", "2", "--test", "rps", "--method", "sgqt", "--grid", "100,1000", "--runs",
                        "3", "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("failed") != std::string::npos);
  const auto l = lines(dir / "raw_rps_2_sgqt.jsonl");
  REQUIRE(l.size() == 6);
  const auto j = nlohmann::json::parse(l[0]);
  CHECK(j["failed"] == true);
  CHECK(j["fidelity"].is_null());
  fs::remove_all(dir);
}

TEST_CASE("report command") {
  const fs::path dir = scratch("report");
  for (const char* method : {"fmub+trml:1", "fmub+frml"})
    REQUIRE(cli({"analyze", "--dims", "2,2", "--test", "rps", "--method", method, "--grid", "1000,10000,100000",
                 "--runs", "40", "--seed", "3", "--out", dir.string()})
                .code == 0);
  const std::string a = (dir / "raw_rps_2x2_fmub+trml-1.jsonl").string();
  const std::string b = (dir / "raw_rps_2x2_fmub+frml.jsonl").string();
  Result r = cli({"report", a, b, "--out", (dir / "rep").string()});
  REQUIRE(r.code == 0);
  const auto csv = lines(dir / "rep" / "report.csv");
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] == "method,N_B,M95,TP95_s,TE95_s,eta,outlier_ratio,factorized,extrapolated");
  CHECK(csv[1].rfind("fmub+trml:1,", 0) == 0);
  CHECK(csv[1].find(",9,") != std::string::npos);
  CHECK(csv[3].rfind("lower_bound,6295.79", 0) == 0);
  const auto json = nlohmann::json::parse(slurp(dir / "rep" / "report.json"));
  CHECK(json["rows"].size() == 3);
  CHECK(std::llround(json["rows"][2]["N_B"].get<double>()) == 6296);
  CHECK(fs::exists(dir / "rep" / "curve_fmub+trml-1.csv"));
  CHECK(lines(dir / "rep" / "curve_fmub+frml.csv").size() == 4);

  CHECK(cli({"report", a, a, "--out", (dir / "dup").string()}).code == 2);
  std::ofstream(dir / "broken.jsonl") << "{not json\n";
  CHECK(cli({"report", (dir / "broken.jsonl").string()}).code == 2);
  CHECK(cli({"report", (dir / "missing.jsonl").string()}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("report on optimal-estimator data") {
  const fs::path dir = scratch("optimal");
  fs::create_directories(dir);
  const std::vector<std::int64_t> grid{1000, 10000, 100000};
  const RawHeader header{TestKind::kRps, {2, 2}, parse_method("fmub+frml")};
  {
    std::ofstream f(dir / "raw.jsonl");
    for (const RunResult& run : synthetic_optimal_runs(4, 1, grid, 1000, 9)) f << raw_line(header, run) << "\n";
  }
  const RawFile back = read_raw_file((dir / "raw.jsonl").string());
  CHECK(back.runs.size() == 3000);
  const Result r = cli({"report", (dir / "raw.jsonl").string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto json = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(std::abs(json["rows"][0]["eta"].get<double>() - 1.0) <= 0.05);
  fs::remove_all(dir);
}

TEST_CASE("every test and method round-trips through report") {
  const fs::path dir = scratch("matrix");
  for (const char* test : {"rps", "rmspt2", "rmsptd", "rnp"}) {
    std::vector<std::string> files;
    for (const char* method : {"fmub+ppi", "fmub+frls", "fmub+frml", "fmub+trml:1", "fmub+trml:2", "fmub+arml",
                               "mub+frml", "pauli+frml", "amub+frml", "fo+frml", "fomub+frml", "sgqt"}) {
      CAPTURE(test);
      CAPTURE(method);
      const Result r = cli({"analyze", "--dims", "2,2", "--test", test, "--method", method, "--grid", "400,4000",
                            "--runs", "3", "--out", (dir / test).string()});
      CHECK(r.code == 0);
      files.push_back(r.out.substr(0, r.out.find('\n')));
    }
    std::vector<std::string> args{"report"};
    args.insert(args.end(), files.begin(), files.end());
    args.push_back("--out");
    args.push_back((dir / test / "report").string());
    const Result r = cli(args);
    CHECK(r.code == 0);
    CHECK(lines(dir / test / "report" / "report.csv").size() == 14);
  }
  fs::remove_all(dir);
}

TEST_CASE("installed binary exit codes") {
  const std::string bin = QTBENCH_CLI_PATH;
  CHECK(std::system((bin + " lowerbound --dims 2,2 --test rps > /dev/null").c_str()) == 0);
  const int bad = std::system((bin + " analyze --dims 2,2 --test rps --method nope+frml 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
}
