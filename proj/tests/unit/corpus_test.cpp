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

#include <algorithm>
#include <set>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "toxicn/corpus.hpp"
#include "toxicn/error.hpp"
#include "toxicn/random.hpp"

using namespace toxicn;
using nlohmann::json;

namespace {

json Record(int toxic, int hate, json groups, json expression) {
  return {{"id", 7},       {"platform", "zhihu"}, {"topic", "race"},
          {"text", "我一看老黑就想吐"}, {"toxic", toxic}, {"hate", hate},
          {"groups", groups}, {"expression", expression}};
}

bool HasViolation(const Verdict& v, Violation x) {
  return std::find(v.violations.begin(), v.violations.end(), x) != v.violations.end();
}

ToxiSample Sample(std::uint64_t id, bool toxic, bool hate, GroupSet groups,
                  std::optional<Expression> e, Topic topic = Topic::kGender) {
  ToxiSample s;
  s.id = id;
  s.topic = topic;
  s.text = "样本" + std::to_string(id);
  s.toxic = toxic;
  s.hate = hate;
  s.groups = groups;
  s.expression = e;
  return s;
}

std::vector<ToxiSample> RandomCorpus(Rng& rng, std::size_t n) {
  std::vector<ToxiSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto topic = static_cast<Topic>(rng.Below(kNumTopics));
    switch (rng.Below(3)) {
      case 0:
        out.push_back(Sample(i + 1, false, false, {}, std::nullopt, topic));
        break;
      case 1:
        out.push_back(Sample(i + 1, true, false, {}, std::nullopt, topic));
        break;
      default:
        out.push_back(Sample(i + 1, true, true,
                             GroupSet(static_cast<std::uint8_t>(1 + rng.Below(15))),
                             static_cast<Expression>(rng.Below(kNumExpressions)), topic));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("a racist explicit sample parses") {
  const ToxiSample s =
      ParseSample(Record(1, 1, {"racism"}, "explicit"), 1, ParseMode::kStrict);
  CHECK(s.id == 7);
  CHECK(s.topic == Topic::kRace);
  CHECK(s.groups == GroupSet{Group::kRacism});
  CHECK(s.expression == Expression::kExplicit);
  CHECK(ValidateHierarchy(s).ok());
}

TEST_CASE("an all-clear sample parses") {
  const ToxiSample s = ParseSample(Record(0, 0, json::array(), nullptr), 1);
  CHECK_FALSE(s.toxic);
  CHECK(s.groups.empty());
  CHECK_FALSE(s.expression.has_value());
}

TEST_CASE("hate without toxic is a hierarchy violation") {
  CHECK_THROWS_AS(ParseSample(Record(0, 1, {"racism"}, "explicit"), 3), ParseError);
  const ToxiSample s =
      ParseSample(Record(0, 1, {"racism"}, "explicit"), 3, ParseMode::kLenient);
  CHECK(HasViolation(ValidateHierarchy(s), Violation::kHateWithoutToxic));
}

TEST_CASE("schema errors name the field") {
  json r = Record(1, 0, json::array(), nullptr);
  r.erase("topic");
  try {
    ParseSample(r, 4);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "topic");
    CHECK(e.record() == 4);
  }
  r = Record(1, 0, json::array(), nullptr);
  r["toxic"] = 2;
  CHECK_THROWS_AS(ParseSample(r, 1), ParseError);
  r = Record(1, 1, {"aliens"}, "explicit");
  CHECK_THROWS_AS(ParseSample(r, 1), ParseError);
}

TEST_CASE("hierarchy verdicts") {
  CHECK(ValidateHierarchy(Sample(1, true, false, {}, std::nullopt)).ok());
  CHECK(HasViolation(ValidateHierarchy(Sample(1, true, true, {}, Expression::kExplicit)),
                     Violation::kHateWithoutGroup));
  CHECK(HasViolation(ValidateHierarchy(Sample(1, false, false, {}, Expression::kReporting)),
                     Violation::kExpressionOnNonToxic));
  CHECK(std::string(Message(Violation::kHateWithoutGroup)) == "hate requires targeted group");
  CHECK(std::string(Message(Violation::kExpressionOnNonToxic)) == "expression on non-toxic");
}

TEST_CASE("hierarchy accepts exactly the enumerated legal tuples") {
  // Legal tuples listed level by level: non-toxic; offensive; hate with a
  // non-empty group set and one expression.
  std::set<std::tuple<bool, bool, int, int>> legal;
  legal.emplace(false, false, 0, -1);
  legal.emplace(true, false, 0, -1);
  for (int g = 1; g < 16; ++g) {
    for (int e = 0; e < kNumExpressions; ++e) legal.emplace(true, true, g, e);
  }
  REQUIRE(legal.size() == 47);
  int accepted = 0;
  for (int toxic = 0; toxic < 2; ++toxic) {
    for (int hate = 0; hate < 2; ++hate) {
      for (int g = 0; g < 16; ++g) {
        for (int e = -1; e < kNumExpressions; ++e) {
          const auto expr = e < 0 ? std::nullopt
                                  : std::optional<Expression>(static_cast<Expression>(e));
          const ToxiSample s = Sample(1, toxic, hate, GroupSet(static_cast<std::uint8_t>(g)), expr);
          const bool ok = ValidateHierarchy(s).ok();
          CHECK(ok == (legal.count({toxic == 1, hate == 1, g, e}) == 1));
          accepted += ok;
        }
      }
    }
  }
  CHECK(accepted == 47);
}

TEST_CASE("train size rounding") {
  CHECK(TrainSize(12011, 0.8) == 9609);
  CHECK(12011 - TrainSize(12011, 0.8) == 2402);
  CHECK(TrainSize(5, 0.8) == 4);
  CHECK(TrainSize(10, 0.8) == 8);
  CHECK(TrainSize(5, 0.5) == 3);  // 2.5 rounds up
  CHECK_THROWS_AS(TrainSize(10, 1.0), ArgumentError);
  CHECK_THROWS_AS(TrainSize(10, 0.0), ArgumentError);
}

TEST_CASE("split needs two samples") {
  Rng rng(9);
  CHECK_THROWS_AS(SplitIndices(RandomCorpus(rng, 1), SplitSpec{}), ArgumentError);
}

TEST_CASE("split is deterministic per seed") {
  Rng rng(1);
  const auto corpus = RandomCorpus(rng, 10);
  const auto a = SplitIndices(corpus, SplitSpec{0.8, 42, false});
  const auto b = SplitIndices(corpus, SplitSpec{0.8, 42, false});
  CHECK(a == b);
  CHECK(a.first.size() == 8);
  const auto c = SplitIndices(corpus, SplitSpec{0.8, 43, false});
  CHECK(c.first.size() == 8);
}

TEST_CASE("split partitions random corpora") {
  Rng rng(2);
  for (int round = 0; round < 1000; ++round) {
    const std::size_t n = 2 + rng.Below(59);
    const auto corpus = RandomCorpus(rng, n);
    const SplitSpec spec{0.5 + 0.4 * rng.Uniform(), rng.Next(), round % 2 == 1};
    const auto [train, test] = SplitDataset(corpus, spec);
    std::set<std::uint64_t> a, b;
    for (const auto& s : train) a.insert(s.id);
    for (const auto& s : test) b.insert(s.id);
    REQUIRE(a.size() == train.size());
    REQUIRE(b.size() == test.size());
    std::set<std::uint64_t> all = a;
    all.insert(b.begin(), b.end());
    CHECK(all.size() == n);
    CHECK(a.size() + b.size() == n);
    CHECK(train.size() == TrainSize(n, spec.train_ratio));
  }
}

TEST_CASE("stratified split keeps class proportions") {
  std::vector<ToxiSample> corpus;
  for (std::uint64_t i = 0; i < 100; ++i) {
    corpus.push_back(i < 30 ? Sample(i + 1, true, false, {}, std::nullopt)
                            : Sample(i + 1, false, false, {}, std::nullopt));
  }
  const auto [train, test] = SplitDataset(corpus, SplitSpec{0.8, 3, true});
  const auto toxic = std::count_if(train.begin(), train.end(), [](auto& s) { return s.toxic; });
  CHECK(train.size() == 80);
  CHECK(toxic == 24);
}

TEST_CASE("stats totals equal the sum of topic rows") {
  Rng rng(3);
  for (int round = 0; round < 50; ++round) {
    const auto corpus = RandomCorpus(rng, rng.Below(200));
    const StatsReport r = CorpusStats(corpus);
    StatsRow sum;
    for (const auto& row : r.by_topic) sum += row;
    CHECK(sum == r.total);
    CHECK(r.total.total == corpus.size());
    CHECK(r.total.toxic == r.total.offensive + r.total.hate);
    CHECK(r.total.total == r.total.toxic + r.total.non_toxic);
    std::size_t by_expr = 0;
    for (auto v : r.total.hate_by_expression) by_expr += v;
    CHECK(by_expr == r.total.hate);
  }
}

TEST_CASE("stats of an empty corpus are zero") {
  const StatsReport r = CorpusStats({});
  CHECK(r.total == StatsRow{});
  CHECK(r.total.average_length() == 0.0);
  CHECK(r.group_total(Group::kSexism) == 0);
}

TEST_CASE("group totals count multi-group samples once per group") {
  const std::vector<ToxiSample> corpus = {
      Sample(1, true, true, {Group::kSexism, Group::kRacism}, Expression::kExplicit),
      Sample(2, true, true, {Group::kSexism}, Expression::kImplicit),
  };
  const StatsReport r = CorpusStats(corpus);
  CHECK(r.group_total(Group::kSexism) == 2);
  CHECK(r.group_total(Group::kRacism) == 1);
  CHECK(r.group_expression[0][1] == 1);
}

TEST_CASE("stats reject invalid records") {
  const std::vector<ToxiSample> corpus = {Sample(9, false, true, {}, std::nullopt)};
  CHECK_THROWS_AS(CorpusStats(corpus), DataError);
}

TEST_CASE("corpus files round trip and report line numbers") {
  const std::vector<ToxiSample> corpus = {
      Sample(1, false, false, {}, std::nullopt),
      Sample(2, true, true, {Group::kAntiLgbtq}, Expression::kReporting, Topic::kLgbtq),
  };
  std::stringstream buf;
  WriteCorpus(buf, corpus);
  CHECK(ReadCorpus(buf, "mem") == corpus);

  std::istringstream no_header("{\"id\":1}\n");
  CHECK_THROWS_AS(ReadCorpus(no_header, "mem"), DataError);

  std::istringstream bad("{\"toxicn_schema\":1}\n" + ToJson(corpus[0]).dump() + "\n{oops\n");
  try {
    ReadCorpus(bad, "bad.jsonl");
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(e.line() == 3);
    CHECK(e.source() == "bad.jsonl");
  }
}
