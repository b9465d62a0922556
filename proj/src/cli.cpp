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

#include "qtb/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtb/raw_io.hpp"
#include "qtb/report.hpp"
#include "qtb/stats.hpp"

namespace qtb {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw Error("bad " + what + " '" + text + "'");
  return value;
}

std::string fmt(double x) {
  if (std::isnan(x)) return {};
  std::ostringstream s;
  s << std::setprecision(10) << x;
  return s.str();
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

std::string file_safe(std::string s) {
  for (char& c : s)
    if (c == ':' || c == '/') c = '-';
  return s;
}

int default_workers() {
  if (const char* env = std::getenv("QTBENCH_WORKERS")) {
    try {
      return parse_number<int>(env, "QTBENCH_WORKERS");
    } catch (const Error&) {
      return 0;  // rejected by validation
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct AnalyzeArgs {
  std::string dims, test, method, grid, out = ".", config;
  double fb = 0.999;
  int runs = 1000;
  std::uint64_t seed = 1;
  int workers = 0;
  bool no_timing = false;
};

void apply_config_file(const AnalyzeArgs& given, AnalyzeArgs& args, SgqtParams& sgqt,
                       const std::map<std::string, const CLI::Option*>& options) {
  if (given.config.empty()) return;
  auto set = [&](const std::string& key) { return options.count(key) == 0 || options.at(key)->count() == 0; };
  for (const auto& [key, value] : parse_config_text(read_text(given.config))) {
    if (key == "dims") {
      if (set(key)) args.dims = value;
    } else if (key == "test") {
      if (set(key)) args.test = value;
    } else if (key == "method") {
      if (set(key)) args.method = value;
    } else if (key == "grid") {
      if (set(key)) args.grid = value;
    } else if (key == "out") {
      if (set(key)) args.out = value;
    } else if (key == "fb") {
      if (set(key)) args.fb = parse_number<double>(value, key);
    } else if (key == "runs") {
      if (set(key)) args.runs = parse_number<int>(value, key);
    } else if (key == "seed") {
      if (set(key)) args.seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "workers") {
      if (set(key)) args.workers = parse_number<int>(value, key);
    } else if (key == "sgqt.A") {
      sgqt.A = parse_number<double>(value, key);
    } else if (key == "sgqt.a") {
      sgqt.a = parse_number<double>(value, key);
    } else if (key == "sgqt.b") {
      sgqt.b = parse_number<double>(value, key);
    } else if (key == "sgqt.s") {
      sgqt.s = parse_number<double>(value, key);
    } else if (key == "sgqt.t") {
      sgqt.t = parse_number<double>(value, key);
    } else if (key == "sgqt.shots") {
      sgqt.shots_per_eval = parse_number<std::int64_t>(value, key);
    } else {
      throw Error("unknown config key '" + key + "'");
    }
  }
}

int cmd_analyze(AnalyzeArgs args, const std::map<std::string, const CLI::Option*>& options, std::ostream& out,
                std::ostream& err) {
  CampaignConfig config;
  try {
    apply_config_file(args, args, config.sgqt, options);
    if (args.dims.empty() || args.test.empty() || args.method.empty())
      throw Error("--dims, --test and --method are required");
    config.dims = parse_dims(args.dims);
    config.test = parse_test_kind(args.test);
    config.method = parse_method(args.method);
    config.n_grid = args.grid.empty() ? default_grid(config.test, config.dims) : parse_grid(args.grid);
    config.runs_per_n = args.runs;
    config.seed = args.seed;
    config.fidelity_target = args.fb;
    config.workers = args.workers;
    validate(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const fs::path path = fs::path(args.out) / raw_file_name(config);
  std::ofstream file;
  try {
    fs::create_directories(args.out);
    file.open(path, std::ios::trunc);
    if (!file) throw Error("cannot write " + path.string());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const RawHeader header{config.test, config.dims, config.method};
  const std::size_t per_n = static_cast<std::size_t>(config.runs_per_n);
  std::size_t emitted = 0;
  std::size_t failures = 0;
  const bool no_timing = args.no_timing;
  const std::vector<RunResult> results = run_campaign(config, [&](const RunResult& r) {
    RunResult copy = r;
    if (no_timing) copy.t_protocol = copy.t_estimator = 0.0;
    file << raw_line(header, copy) << '\n';
    ++emitted;
    if (r.failed) {
      ++failures;
      err << "run N=" << r.n_total << " #" << r.run_index << " failed: " << r.error << "\n";
    }
    if (emitted % per_n == 0) {
      file.flush();
      err << "[" << config.method.id() << "] N=" << r.n_total << " done (" << emitted << "/"
          << per_n * config.n_grid.size() << ")\n";
    }
  });
  file.close();
  out << path.string() << "\n";
  if (campaign_failed(results)) {
    err << "error: " << failures << " of " << results.size() << " runs failed\n";
    return kExitCampaignFailed;
  }
  return kExitOk;
}

nlohmann::ordered_json row_json(const BenchmarkReport& r) {
  auto opt = [](const std::optional<double>& x) { return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(); };
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["N_B"] = std::isnan(r.n_b) ? nlohmann::ordered_json() : nlohmann::ordered_json(r.n_b);
  j["M95"] = opt(r.bases95);
  j["TP95_s"] = opt(r.t_protocol95);
  j["TE95_s"] = opt(r.t_estimator95);
  j["eta"] = opt(r.efficiency);
  j["outlier_ratio"] = opt(r.outlier_ratio);
  j["factorized"] = r.factorized;
  j["extrapolated"] = r.extrapolated;
  return j;
}

int cmd_report(const std::vector<std::string>& files, double fb, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  std::vector<RawFile> raws;
  try {
    if (!(fb > 0.0 && fb < 1.0)) throw Error("F_B must lie in (0, 1)");
    std::set<std::string> methods;
    for (const std::string& f : files) {
      raws.push_back(read_raw_file(f));
      const RawHeader& h = raws.back().header;
      if (!methods.insert(h.method.id()).second) throw Error("duplicate method " + h.method.id());
      if (h.test != raws.front().header.test || h.dims != raws.front().header.dims)
        throw Error(f + ": every raw file must share one test and one set of dims");
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const RawHeader& common = raws.front().header;
  const int d = total_dim(common.dims);
  const int r = structural_rank(common.test, d);
  std::vector<BenchmarkReport> rows;
  std::vector<std::pair<std::string, PercentileCurve>> curves;
  try {
    for (const RawFile& raw : raws) {
      const std::string id = raw.header.method.id();
      curves.emplace_back(id, percentile_curve(raw.runs, d, r));
      try {
        rows.push_back(compile_report(id, raw.runs, fb, d, r, raw.header.method.factorized()));
      } catch (const Error& e) {
        // The curve never reaches the target: keep the row, without N_B.
        err << "warning: " << id << ": " << e.what() << "\n";
        BenchmarkReport row;
        row.method = id;
        row.n_b = std::numeric_limits<double>::quiet_NaN();
        row.factorized = raw.header.method.factorized();
        rows.push_back(row);
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCampaignFailed;
  }
  rows.push_back(lower_bound_report(fb, d, r));

  fs::create_directories(out_dir);
  const char* header = "method,N_B,M95,TP95_s,TE95_s,eta,outlier_ratio,factorized,extrapolated";
  std::ofstream csv(fs::path(out_dir) / "report.csv");
  csv << header << "\n";
  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const BenchmarkReport& row : rows) {
    csv << row.method << ',' << fmt(row.n_b) << ',' << fmt(row.bases95) << ',' << fmt(row.t_protocol95) << ','
        << fmt(row.t_estimator95) << ',' << fmt(row.efficiency) << ',' << fmt(row.outlier_ratio) << ','
        << (row.factorized ? "true" : "false") << ',' << (row.extrapolated ? "true" : "false") << "\n";
    rows_json.push_back(row_json(row));
  }
  nlohmann::ordered_json doc;
  doc["test"] = std::string(to_string(common.test));
  doc["dims"] = common.dims;
  doc["fidelity_target"] = fb;
  doc["rows"] = rows_json;
  std::ofstream(fs::path(out_dir) / "report.json") << doc.dump(2) << "\n";

  for (const auto& [id, c] : curves) {
    std::ofstream f(fs::path(out_dir) / ("curve_" + file_safe(id) + ".csv"));
    f << "N,infidelity95,mean_infidelity,M95,TP95_s,TE95_s,eta,outlier_ratio,runs\n";
    for (std::size_t i = 0; i < c.n.size(); ++i)
      f << fmt(c.n[i]) << ',' << fmt(c.infidelity95[i]) << ',' << fmt(c.mean_infidelity[i]) << ','
        << fmt(c.bases95[i]) << ',' << fmt(c.t_protocol95[i]) << ',' << fmt(c.t_estimator95[i]) << ','
        << fmt(c.efficiency[i]) << ',' << fmt(c.outlier_ratio[i]) << ',' << c.runs[i] << "\n";
  }

  out << header << "\n";
  for (const BenchmarkReport& row : rows)
    out << row.method << ',' << fmt(row.n_b) << ',' << fmt(row.bases95) << ',' << fmt(row.t_protocol95) << ','
        << fmt(row.t_estimator95) << ',' << fmt(row.efficiency) << ',' << fmt(row.outlier_ratio) << ','
        << (row.factorized ? "true" : "false") << ',' << (row.extrapolated ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_lowerbound(const std::string& dims_text, const std::string& test_text, double fb, std::ostream& out,
                   std::ostream& err) {
  try {
    if (!(fb > 0.0 && fb < 1.0)) throw Error("F_B must lie in (0, 1)");
    const Dims dims = parse_dims(dims_text);
    const TestKind test = parse_test_kind(test_text);
    const int d = total_dim(dims);
    const int r = structural_rank(test, d);
    const double n_b = lower_bound_NB(fb, d, r);
    out << "N_B,nu,d0\n"
        << std::llround(n_b) << ',' << nu(d, r) << ',' << fmt(optimal_parameter_variance(n_b, d, r)) << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

Dims parse_dims(const std::string& text) {
  Dims dims;
  for (const std::string& part : split(text, ',')) dims.push_back(parse_number<int>(part, "dimension"));
  if (dims.empty()) throw Error("empty dims");
  total_dim(dims);
  return dims;
}

std::vector<std::int64_t> parse_grid(const std::string& text) {
  std::vector<std::int64_t> grid;
  for (const std::string& part : split(text, ',')) {
    const double v = parse_number<double>(part, "sample size");
    if (!(v >= 1.0) || v != std::floor(v) || v > 9.0e18) throw Error("bad sample size '" + part + "'");
    grid.push_back(static_cast<std::int64_t>(v));
  }
  if (grid.empty()) throw Error("empty grid");
  return grid;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

std::string raw_file_name(const CampaignConfig& config) {
  std::string dims;
  for (std::size_t i = 0; i < config.dims.size(); ++i) dims += (i ? "x" : "") + std::to_string(config.dims[i]);
  return "raw_" + std::string(to_string(config.test)) + "_" + dims + "_" + file_safe(config.method.id()) + ".jsonl";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Benchmarking of quantum state tomography methods", "qtbench"};
  app.require_subcommand(1);

  AnalyzeArgs a;
  a.workers = default_workers();
  std::map<std::string, const CLI::Option*> options;
  CLI::App* analyze = app.add_subcommand("analyze", "Run a Monte Carlo campaign and write raw JSON-lines results");
  options["dims"] = analyze->add_option("--dims", a.dims, "Subsystem dimensions, e.g. 2,2");
  options["test"] = analyze->add_option("--test", a.test, "rps | rmspt2 | rmsptd | rnp");
  options["method"] = analyze->add_option("--method", a.method, "protocol+estimator (e.g. fmub+trml:1) or sgqt");
  options["fb"] = analyze->add_option("--fb", a.fb, "Benchmark fidelity F_B")->capture_default_str();
  options["grid"] = analyze->add_option("--grid", a.grid, "Comma-separated sample sizes");
  options["runs"] = analyze->add_option("--runs", a.runs, "Runs per sample size")->capture_default_str();
  options["seed"] = analyze->add_option("--seed", a.seed, "Base seed")->capture_default_str();
  options["workers"] = analyze->add_option("--workers", a.workers, "Worker threads (default $QTBENCH_WORKERS)");
  options["out"] = analyze->add_option("--out", a.out, "Output directory")->capture_default_str();
  analyze->add_option("--config", a.config, "key = value file; command-line flags take precedence");
  analyze->add_flag("--no-timing", a.no_timing, "Write zero timings so reruns compare byte for byte");

  std::vector<std::string> files;
  double report_fb = 0.999;
  std::string report_out = ".";
  CLI::App* report = app.add_subcommand("report", "Compile benchmark tables from raw results");
  report->add_option("raw", files, "Raw JSON-lines files")->required();
  report->add_option("--fb", report_fb, "Benchmark fidelity F_B")->capture_default_str();
  report->add_option("--out", report_out, "Output directory")->capture_default_str();

  std::string lb_dims, lb_test;
  double lb_fb = 0.999;
  CLI::App* lowerbound = app.add_subcommand("lowerbound", "Print the theoretical benchmark sample size");
  lowerbound->add_option("--dims", lb_dims, "Subsystem dimensions, e.g. 2,2")->required();
  lowerbound->add_option("--test", lb_test, "rps | rmspt2 | rmsptd | rnp")->required();
  lowerbound->add_option("--fb", lb_fb, "Benchmark fidelity F_B")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  if (*analyze) return cmd_analyze(a, options, out, err);
  if (*report) return cmd_report(files, report_fb, report_out, out, err);
  return cmd_lowerbound(lb_dims, lb_test, lb_fb, out, err);
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace qtb
