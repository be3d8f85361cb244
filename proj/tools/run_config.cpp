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

#include "run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "toxicn/error.hpp"

#ifndef TOXICN_DEFAULT_RESOURCE_DIR
#define TOXICN_DEFAULT_RESOURCE_DIR "resources"
#endif

namespace toxicn::cli {

namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw DataError("bad value '" + std::string(value) + "' for " +
                    std::string(key));
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw DataError("bad boolean '" + std::string(value) + "' for " + std::string(key));
}

std::vector<std::string_view> SplitCommas(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = Trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> ParseSeedList(std::string_view s) {
  std::vector<std::uint64_t> seeds;
  for (auto item : SplitCommas(s)) {
    seeds.push_back(ParseNumber<std::uint64_t>("seeds", item));
  }
  if (seeds.empty()) throw DataError("empty seed list");
  return seeds;
}

std::vector<Task> ParseTaskList(std::string_view s) {
  if (Trim(s) == "all") return {kAllTasks.begin(), kAllTasks.end()};
  std::vector<Task> tasks;
  for (auto item : SplitCommas(s)) {
    const auto t = ParseTask(item);
    if (!t) throw DataError("unknown task '" + std::string(item) + "'");
    tasks.push_back(*t);
  }
  if (tasks.empty()) throw DataError("empty task list");
  return tasks;
}

void ApplySetting(RunConfig& cfg, std::string_view key, std::string_view value) {
  auto& m = cfg.model;
  if (key == "dim" || key == "d") {
    m.dim = ParseNumber<int>(key, value);
  } else if (key == "lambda") {
    m.lambda = ParseNumber<double>(key, value);
  } else if (key == "hidden") {
    m.hidden = ParseNumber<int>(key, value);
  } else if (key == "pad_len") {
    m.pad_len = ParseNumber<int>(key, value);
  } else if (key == "epochs") {
    m.epochs = ParseNumber<int>(key, value);
  } else if (key == "batch") {
    m.batch = ParseNumber<int>(key, value);
  } else if (key == "learning_rate" || key == "lr") {
    m.learning_rate = ParseNumber<double>(key, value);
  } else if (key == "dropout") {
    m.dropout = ParseNumber<double>(key, value);
  } else if (key == "seed") {
    m.seed = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "task") {
    const auto t = ParseTask(value);
    if (!t) throw DataError("unknown task '" + std::string(value) + "'");
    m.task = *t;
  } else if (key == "patience") {
    m.patience = ParseNumber<int>(key, value);
  } else if (key == "val_ratio") {
    m.val_ratio = ParseNumber<double>(key, value);
  } else if (key == "knowledge_enhancement") {
    m.knowledge_enhancement = ParseBool(key, value);
  } else if (key == "init_range") {
    m.init_range = ParseNumber<double>(key, value);
  } else if (key == "corpus") {
    cfg.corpus = std::string(value);
  } else if (key == "lexicon") {
    cfg.lexicon = std::string(value);
  } else if (key == "resources") {
    cfg.resources = std::string(value);
  } else if (key == "output_dir") {
    cfg.output_dir = std::string(value);
  } else if (key == "seeds") {
    cfg.seeds = ParseSeedList(value);
  } else if (key == "tasks") {
    cfg.tasks = ParseTaskList(value);
  } else if (key == "train_ratio") {
    cfg.train_ratio = ParseNumber<double>(key, value);
  } else if (key == "stratify") {
    cfg.stratify = ParseBool(key, value);
  } else if (key == "cascade") {
    if (value == "gold") {
      cfg.predicted_cascade = false;
    } else if (value == "predicted") {
      cfg.predicted_cascade = true;
    } else {
      throw DataError("cascade must be 'gold' or 'predicted'");
    }
  } else {
    throw DataError("unknown configuration key '" + std::string(key) + "'");
  }
}

RunConfig LoadRunConfig(std::istream& in, const std::string& source,
                        RunConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = Trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("expected key=value", source, line_no);
    }
    try {
      ApplySetting(base, Trim(body.substr(0, eq)), Trim(body.substr(eq + 1)));
    } catch (const DataError& e) {
      throw DataError(e.what(), source, line_no);
    }
  }
  return base;
}

RunConfig LoadRunConfig(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file", path.string());
  return LoadRunConfig(in, path.string(), std::move(base));
}

std::filesystem::path ResourceDir(const RunConfig& cfg) {
  if (const char* env = std::getenv("TOXICN_RESOURCES"); env && *env) return env;
  if (!cfg.resources.empty()) return cfg.resources;
  return TOXICN_DEFAULT_RESOURCE_DIR;
}

}  // namespace toxicn::cli
