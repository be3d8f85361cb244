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

#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "toxicn/error.hpp"

namespace toxicn::cli {

namespace fs = std::filesystem;

std::vector<std::string> ClassNames(Task task) {
  switch (task) {
    case Task::kToxic:
      return {"non_toxic", "toxic"};
    case Task::kType:
      return {"offensive", "hate"};
    case Task::kGroup: {
      std::vector<std::string> names;
      for (int g = 0; g < kNumGroups; ++g) {
        names.emplace_back(ToString(static_cast<Group>(g)));
      }
      return names;
    }
    case Task::kExpression: {
      std::vector<std::string> names;
      for (int e = 0; e < kNumExpressions; ++e) {
        names.emplace_back(ToString(static_cast<Expression>(e)));
      }
      return names;
    }
  }
  return {};
}

TaskEvaluation Evaluate(Task task, std::span<const ToxiSample> samples,
                        std::span<const Label> predicted) {
  if (samples.size() != predicted.size()) {
    throw ArgumentError("Evaluate: samples and predictions differ in length");
  }
  TaskEvaluation out;
  out.task = task;
  out.samples = samples.size();
  std::size_t correct = 0;
  if (samples.empty()) {
    // Nothing reached the model; every score stays zero.
  } else if (IsMultiLabel(task)) {
    std::vector<std::uint32_t> pred, gold;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Label g = LabelFor(samples[i], task);
      pred.push_back(predicted[i].groups);
      gold.push_back(g.groups);
      correct += predicted[i].groups == g.groups;
    }
    out.prf = WeightedPrfMultiLabel(pred, gold, NumOutputs(task));
  } else {
    std::vector<int> pred, gold;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Label g = LabelFor(samples[i], task);
      pred.push_back(predicted[i].cls);
      gold.push_back(g.cls);
      correct += predicted[i].cls == g.cls;
    }
    out.prf = WeightedPrf(pred, gold, NumOutputs(task));
  }
  out.accuracy = samples.empty() ? 0.0
                                 : 100.0 * static_cast<double>(correct) /
                                       static_cast<double>(samples.size());
  if (task == Task::kToxic) {
    // std::vector<bool> is not contiguous, hence the plain array.
    std::unique_ptr<bool[]> toxic_pred(new bool[predicted.size()]);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      toxic_pred[i] = predicted[i].cls == 1;
    }
    out.breakdown = ExpressionAccuracyBreakdown(
        std::span<const bool>(toxic_pred.get(), predicted.size()), samples);
  }
  return out;
}

nlohmann::json ToJson(const TaskEvaluation& e) {
  const auto names = ClassNames(e.task);
  nlohmann::json j;
  j["task"] = std::string(ToString(e.task));
  j["samples"] = e.samples;
  j["accuracy"] = e.accuracy;
  j["metrics"] = ToJson(e.prf, names);
  if (e.breakdown) j["expression_breakdown"] = ToJson(*e.breakdown);
  return j;
}

std::string FormatEvaluation(const TaskEvaluation& e) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof line, "task %s, %zu samples, accuracy %.1f\n",
                std::string(ToString(e.task)).c_str(), e.samples, e.accuracy);
  out << line;
  const auto names = ClassNames(e.task);
  out << FormatPrfTable(e.prf, names);
  if (e.breakdown) out << FormatBreakdown(*e.breakdown);
  return out.str();
}

MetricSummary Summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

nlohmann::json AggregateReports(const fs::path& dir) {
  // task -> seed -> report
  std::map<std::string, std::map<std::uint64_t, nlohmann::json>> found;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw DataError("report directory not found", dir.string());
  }
  for (const auto& item : fs::directory_iterator(dir)) {
    const std::string name = item.path().filename().string();
    if (!item.is_regular_file() || name.rfind("seed-", 0) != 0 ||
        item.path().extension() != ".json") {
      continue;
    }
    const std::string stem = item.path().stem().string().substr(5);
    const auto dash = stem.find('-');
    if (dash == std::string::npos) continue;
    std::uint64_t seed = 0;
    try {
      std::size_t used = 0;
      seed = std::stoull(stem.substr(0, dash), &used);
      if (used != dash) continue;
    } catch (const std::exception&) {
      continue;
    }
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(ReadFile(item.path()));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed report: ") + e.what(),
                      item.path().string());
    }
    found[stem.substr(dash + 1)][seed] = std::move(report);
  }
  if (found.empty()) throw DataError("no per-seed reports", dir.string());

  nlohmann::json summary = nlohmann::json::object();
  for (Task t : kAllTasks) {
    const std::string task(ToString(t));
    const auto it = found.find(task);
    if (it == found.end()) continue;
    nlohmann::json entry;
    std::vector<std::uint64_t> seeds;
    for (const char* metric : {"precision", "recall", "f1"}) {
      std::vector<double> values;
      for (const auto& [seed, report] : it->second) {
        try {
          values.push_back(report.at("metrics").at(metric).get<double>());
        } catch (const nlohmann::json::exception&) {
          throw DataError(std::string("report lacks metric '") + metric + "'",
                          (dir / ("seed-" + std::to_string(seed) + "-" + task +
                                  ".json"))
                              .string());
        }
      }
      const MetricSummary s = Summarize(values);
      entry[metric] = {{"mean", s.mean}, {"sd", s.sd}};
    }
    for (const auto& [seed, report] : it->second) seeds.push_back(seed);
    entry["seeds"] = seeds;
    summary[task] = std::move(entry);
  }
  return summary;
}

std::string FormatAggregate(const nlohmann::json& summary) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-11s %6s %-11s %-11s %-11s\n", "task",
                "seeds", "P", "R", "F1");
  out << line;
  for (Task t : kAllTasks) {
    const std::string task(ToString(t));
    if (!summary.contains(task)) continue;
    const auto& e = summary.at(task);
    auto cell = [&](const char* m) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.1f±%.1f",
                    RoundTo1(e.at(m).at("mean").get<double>()),
                    RoundTo1(e.at(m).at("sd").get<double>()));
      return std::string(buf);
    };
    // Pad by code points; the ± sign is two bytes.
    auto pad = [](std::string s) {
      s.append(s.size() < 12 ? 12 - s.size() : 1, ' ');
      return s;
    };
    std::snprintf(line, sizeof line, "%-11s %6zu ", task.c_str(),
                  e.at("seeds").size());
    out << line << pad(cell("precision")) << pad(cell("recall")) << cell("f1")
        << "\n";
  }
  return out.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw DataError("cannot create directory: " + ec.message(),
                            path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing", path.string());
  out << text;
  out.flush();
  if (!out) throw DataError("write failed", path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace toxicn::cli
