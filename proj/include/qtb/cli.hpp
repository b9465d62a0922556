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

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitCampaignFailed = 1, kExitUsage = 2 };

Dims parse_dims(const std::string& text);
std::vector<std::int64_t> parse_grid(const std::string& text);

/// Flat "key = value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

/// File name of the raw results of one campaign, e.g. raw_rps_2x2_fmub+trml-1.jsonl.
std::string raw_file_name(const CampaignConfig& config);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace qtb
