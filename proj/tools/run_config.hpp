// Copyright 2026 The toxicn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TOXICN_TOOLS_RUN_CONFIG_HPP_
#define TOXICN_TOOLS_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "toxicn/tke.hpp"

namespace toxicn::cli {

// Everything a training run needs. Loaded from a key=value file; command
// line flags override file values.
struct RunConfig {
  TkeConfig model;
  std::filesystem::path corpus;
  std::filesystem::path lexicon;
  std::filesystem::path resources;
  std::filesystem::path output_dir = "toxicn_out";
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<Task> tasks = {kAllTasks.begin(), kAllTasks.end()};
  double train_ratio = 0.8;
  bool stratify = false;
  // Subtasks see only samples the upstream models predicted positive.
  bool predicted_cascade = false;
};

// Applies one key=value setting. Throws DataError on unknown keys or bad
// values.
void ApplySetting(RunConfig& cfg, std::string_view key, std::string_view value);

// '#' comments and blank lines are ignored; "key = value" otherwise.
RunConfig LoadRunConfig(std::istream& in, const std::string& source,
                        RunConfig base = {});
RunConfig LoadRunConfig(const std::filesystem::path& path, RunConfig base = {});

std::vector<std::uint64_t> ParseSeedList(std::string_view s);
std::vector<Task> ParseTaskList(std::string_view s);

// Resource directory: $TOXICN_RESOURCES, else the configured one, else the
// directory shipped with the sources.
std::filesystem::path ResourceDir(const RunConfig& cfg);

}  // namespace toxicn::cli

#endif  // TOXICN_TOOLS_RUN_CONFIG_HPP_
