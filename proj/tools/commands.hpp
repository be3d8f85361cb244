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

#ifndef TOXICN_TOOLS_COMMANDS_HPP_
#define TOXICN_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "run_config.hpp"

namespace toxicn::cli {

using Path = std::filesystem::path;

struct NormalizeOptions {
  Path in;
  Path out;
  int min_chars = 4;
  std::optional<Path> exclude;
};
void RunNormalize(const NormalizeOptions& o, std::ostream& out);

struct MatchOptions {
  Path lexicon;
  Path in;
  Path out;
};
void RunMatch(const MatchOptions& o, std::ostream& out);

struct DeriveOptions {
  std::string term;
  std::string rule = "all";
  std::size_t limit = 50;
  Path resources;
};
void RunDerive(const DeriveOptions& o, std::ostream& out);

struct PseudolabelOptions {
  Path lexicon;
  Path in;
  std::optional<Path> accept;
  Path out;
  std::optional<Path> report;
  std::optional<Path> lexicon_out;
  std::size_t min_freq = 3;
  double min_score = 3.0;
  std::size_t max_n = 4;
};
void RunPseudolabel(const PseudolabelOptions& o, std::ostream& out);

// Returns the number of invalid records.
std::size_t RunValidate(const Path& in, std::ostream& out, std::ostream& err);

struct StatsOptions {
  Path in;
  std::optional<Path> json;
};
void RunStats(const StatsOptions& o, std::ostream& out);

struct TrainOptions {
  RunConfig config;
  Path out_dir;
  // Train on the whole corpus instead of holding out a test split.
  bool no_split = false;
};
void RunTrain(const TrainOptions& o, std::ostream& out);

struct EvalOptions {
  Path model;
  Path test;
  std::optional<Path> report;
};
void RunEval(const EvalOptions& o, std::ostream& out);

struct GradcheckOptions {
  int configs = 10;
  std::uint64_t seed = 1;
  double tolerance = 1e-4;
  double corrupt_threshold = 1e-1;
};
// Throws CheckFailure when a check fails.
void RunGradcheck(const GradcheckOptions& o, std::ostream& out);

struct PipelineOptions {
  RunConfig config;
  // Skip training and summarize the reports already on disk.
  bool aggregate_only = false;
};
void RunPipeline(const PipelineOptions& o, std::ostream& out);

void RunKappa(const Path& in, std::ostream& out);

}  // namespace toxicn::cli

#endif  // TOXICN_TOOLS_COMMANDS_HPP_
