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

#ifndef TOXICN_TOOLS_REPORT_HPP_
#define TOXICN_TOOLS_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxicn/corpus.hpp"
#include "toxicn/metrics.hpp"
#include "toxicn/tke.hpp"

namespace toxicn::cli {

std::vector<std::string> ClassNames(Task task);

struct TaskEvaluation {
  Task task = Task::kToxic;
  std::size_t samples = 0;
  double accuracy = 0.0;  // percent
  PrfReport prf;
  // Toxic task only.
  std::optional<ExpressionBreakdown> breakdown;
};

// `samples` and `predicted` are aligned; every sample must carry a gold
// label for the task. An empty sample list yields all-zero scores.
TaskEvaluation Evaluate(Task task, std::span<const ToxiSample> samples,
                        std::span<const Label> predicted);

nlohmann::json ToJson(const TaskEvaluation& e);
std::string FormatEvaluation(const TaskEvaluation& e);

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
};

MetricSummary Summarize(std::span<const double> values);

// Reads every "seed-<n>-<task>.json" report in `dir` and summarizes
// precision, recall and F1 per task, seeds in ascending order.
nlohmann::json AggregateReports(const std::filesystem::path& dir);
std::string FormatAggregate(const nlohmann::json& summary);

// Writes `text` to `path`, creating parent directories.
void WriteFile(const std::filesystem::path& path, const std::string& text);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace toxicn::cli

#endif  // TOXICN_TOOLS_REPORT_HPP_
