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

#ifndef TOXICN_CORPUS_HPP_
#define TOXICN_CORPUS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace toxicn {

enum class Platform : std::uint8_t { kZhihu, kTieba };
enum class Topic : std::uint8_t { kGender, kRace, kRegion, kLgbtq };
enum class Group : std::uint8_t { kSexism, kRacism, kRegionalBias, kAntiLgbtq };
enum class Expression : std::uint8_t { kExplicit, kImplicit, kReporting };

inline constexpr int kNumTopics = 4;
inline constexpr int kNumGroups = 4;
inline constexpr int kNumExpressions = 3;

std::string_view ToString(Platform p);
std::string_view ToString(Topic t);
std::string_view ToString(Group g);
std::string_view ToString(Expression e);
std::optional<Platform> ParsePlatform(std::string_view s);
std::optional<Topic> ParseTopic(std::string_view s);
std::optional<Group> ParseGroup(std::string_view s);
std::optional<Expression> ParseExpression(std::string_view s);

// Set of targeted groups, stored as a 4-bit mask (bit i = Group i).
class GroupSet {
 public:
  constexpr GroupSet() = default;
  constexpr explicit GroupSet(std::uint8_t mask) : mask_(mask & 0xF) {}
  GroupSet(std::initializer_list<Group> groups) {
    for (Group g : groups) insert(g);
  }

  void insert(Group g) { mask_ |= Bit(g); }
  bool contains(Group g) const { return (mask_ & Bit(g)) != 0; }
  bool empty() const { return mask_ == 0; }
  int size() const { return __builtin_popcount(mask_); }
  std::uint8_t mask() const { return mask_; }
  std::vector<Group> members() const;

  friend bool operator==(GroupSet, GroupSet) = default;

 private:
  static std::uint8_t Bit(Group g) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(g));
  }
  std::uint8_t mask_ = 0;
};

// One comment with its four-level labels:
//   toxic? -> hate or general offensive -> targeted groups -> expression.
struct ToxiSample {
  std::uint64_t id = 0;
  Platform platform = Platform::kZhihu;
  Topic topic = Topic::kGender;
  std::string text;
  bool toxic = false;
  bool hate = false;
  GroupSet groups;
  std::optional<Expression> expression;

  bool offensive() const { return toxic && !hate; }
  friend bool operator==(const ToxiSample&, const ToxiSample&) = default;
};

enum class Violation : std::uint8_t {
  kHateWithoutToxic,
  kGroupsOnNonToxic,
  kExpressionOnNonToxic,
  kHateWithoutGroup,
  kHateWithoutExpression,
  kGroupsOnOffensive,
  kExpressionOnOffensive,
};

std::string_view Message(Violation v);

struct Verdict {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string ToString() const;
};

// Every rule of the label hierarchy the sample breaks, in rule order.
Verdict ValidateHierarchy(const ToxiSample& sample);

enum class ParseMode {
  kStrict,   // hierarchy violations are parse errors
  kLenient,  // only schema errors are raised; call ValidateHierarchy yourself
};

// Decodes one corpus record. Unknown keys are ignored. An empty list or empty
// string for "expression" is read as absent.
ToxiSample ParseSample(const nlohmann::json& record, std::size_t record_index,
                       ParseMode mode = ParseMode::kStrict);
ToxiSample ParseSample(std::string_view line, std::size_t record_index,
                       ParseMode mode = ParseMode::kStrict);
nlohmann::json ToJson(const ToxiSample& sample);

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kSchemaKey = "toxicn_schema";

// Corpus files are JSON Lines whose first line is {"toxicn_schema": 1}.
// Errors carry the 1-based line number as record index.
std::vector<ToxiSample> ReadCorpus(const std::filesystem::path& path,
                                   ParseMode mode = ParseMode::kStrict);
std::vector<ToxiSample> ReadCorpus(std::istream& in, const std::string& source,
                                   ParseMode mode = ParseMode::kStrict);
void WriteCorpus(const std::filesystem::path& path,
                 std::span<const ToxiSample> samples);
void WriteCorpus(std::ostream& out, std::span<const ToxiSample> samples);

struct SplitSpec {
  double train_ratio = 0.8;
  std::uint64_t seed = 1;
  // Shuffle within (toxic, hate, expression) strata and apportion the train
  // quota across strata by largest remainder.
  bool stratify = false;
};

// round-half-up(ratio * n)
std::size_t TrainSize(std::size_t n, double ratio);

// Index permutation split: first = train indices, second = test indices.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> SplitIndices(
    std::span<const ToxiSample> corpus, const SplitSpec& spec);

std::pair<std::vector<ToxiSample>, std::vector<ToxiSample>> SplitDataset(
    std::span<const ToxiSample> corpus, const SplitSpec& spec);

struct StatsRow {
  std::size_t non_toxic = 0;
  std::size_t toxic = 0;
  std::size_t offensive = 0;
  std::size_t hate = 0;
  std::array<std::size_t, kNumExpressions> hate_by_expression{};
  std::size_t total = 0;
  std::size_t chars = 0;

  double average_length() const {
    return total == 0 ? 0.0 : static_cast<double>(chars) / total;
  }
  StatsRow& operator+=(const StatsRow& o);
  friend bool operator==(const StatsRow&, const StatsRow&) = default;
};

struct StatsReport {
  std::array<StatsRow, kNumTopics> by_topic{};
  StatsRow total;
  // [group][expression] counts of hate samples; a sample attacking several
  // groups is counted once per group.
  std::array<std::array<std::size_t, kNumExpressions>, kNumGroups>
      group_expression{};

  std::size_t group_total(Group g) const;
};

// Requires every sample to pass ValidateHierarchy; otherwise throws a
// DataError listing the offending ids.
StatsReport CorpusStats(std::span<const ToxiSample> corpus);

nlohmann::json ToJson(const StatsReport& report);
std::string FormatStatsTable(const StatsReport& report);

}  // namespace toxicn

#endif  // TOXICN_CORPUS_HPP_
