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

#include "toxicn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "toxicn/error.hpp"
#include "toxicn/random.hpp"
#include "toxicn/utf8.hpp"

namespace toxicn {

namespace {

constexpr std::array<std::string_view, 2> kPlatformNames = {"zhihu", "tieba"};
constexpr std::array<std::string_view, kNumTopics> kTopicNames = {
    "gender", "race", "region", "lgbtq"};
constexpr std::array<std::string_view, kNumGroups> kGroupNames = {
    "sexism", "racism", "regional_bias", "anti_lgbtq"};
constexpr std::array<std::string_view, kNumExpressions> kExpressionNames = {
    "explicit", "implicit", "reporting"};

template <typename Enum, std::size_t N>
std::optional<Enum> Lookup(const std::array<std::string_view, N>& names,
                           std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

const nlohmann::json& Require(const nlohmann::json& record,
                              const char* field, std::size_t index) {
  auto it = record.find(field);
  if (it == record.end()) throw ParseError("missing field", field, index);
  return *it;
}

bool ReadFlag(const nlohmann::json& record, const char* field,
              std::size_t index) {
  const auto& v = Require(record, field, index);
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto x = v.get<std::int64_t>();
    if (x == 0 || x == 1) return x == 1;
  }
  throw ParseError("expected 0 or 1, got " + v.dump(), field, index);
}

template <typename Enum>
Enum ReadEnum(const nlohmann::json& record, const char* field,
              std::size_t index,
              std::optional<Enum> (*parse)(std::string_view)) {
  const auto& v = Require(record, field, index);
  if (!v.is_string()) throw ParseError("expected a string", field, index);
  auto parsed = parse(v.get_ref<const std::string&>());
  if (!parsed) {
    throw ParseError("unknown value " + v.dump(), field, index);
  }
  return *parsed;
}

}  // namespace

std::string_view ToString(Platform p) {
  return kPlatformNames[static_cast<std::size_t>(p)];
}
std::string_view ToString(Topic t) {
  return kTopicNames[static_cast<std::size_t>(t)];
}
std::string_view ToString(Group g) {
  return kGroupNames[static_cast<std::size_t>(g)];
}
std::string_view ToString(Expression e) {
  return kExpressionNames[static_cast<std::size_t>(e)];
}
std::optional<Platform> ParsePlatform(std::string_view s) {
  return Lookup<Platform>(kPlatformNames, s);
}
std::optional<Topic> ParseTopic(std::string_view s) {
  return Lookup<Topic>(kTopicNames, s);
}
std::optional<Group> ParseGroup(std::string_view s) {
  return Lookup<Group>(kGroupNames, s);
}
std::optional<Expression> ParseExpression(std::string_view s) {
  return Lookup<Expression>(kExpressionNames, s);
}

std::vector<Group> GroupSet::members() const {
  std::vector<Group> out;
  for (int g = 0; g < kNumGroups; ++g) {
    if (contains(static_cast<Group>(g))) out.push_back(static_cast<Group>(g));
  }
  return out;
}

std::string_view Message(Violation v) {
  switch (v) {
    case Violation::kHateWithoutToxic:
      return "hate requires toxic";
    case Violation::kGroupsOnNonToxic:
      return "groups on non-toxic";
    case Violation::kExpressionOnNonToxic:
      return "expression on non-toxic";
    case Violation::kHateWithoutGroup:
      return "hate requires targeted group";
    case Violation::kHateWithoutExpression:
      return "hate requires expression";
    case Violation::kGroupsOnOffensive:
      return "groups on general offensive";
    case Violation::kExpressionOnOffensive:
      return "expression on general offensive";
  }
  return "unknown violation";
}

std::string Verdict::ToString() const {
  if (ok()) return "ok";
  std::string out = "hierarchy violation: ";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out += "; ";
    out += Message(violations[i]);
  }
  return out;
}

Verdict ValidateHierarchy(const ToxiSample& s) {
  Verdict v;
  auto& out = v.violations;
  if (s.hate && !s.toxic) out.push_back(Violation::kHateWithoutToxic);
  if (!s.toxic) {
    if (!s.groups.empty()) out.push_back(Violation::kGroupsOnNonToxic);
    if (s.expression) out.push_back(Violation::kExpressionOnNonToxic);
  }
  if (s.hate) {
    if (s.groups.empty()) out.push_back(Violation::kHateWithoutGroup);
    if (!s.expression) out.push_back(Violation::kHateWithoutExpression);
  }
  if (s.offensive()) {
    if (!s.groups.empty()) out.push_back(Violation::kGroupsOnOffensive);
    if (s.expression) out.push_back(Violation::kExpressionOnOffensive);
  }
  return v;
}

ToxiSample ParseSample(const nlohmann::json& record, std::size_t index,
                       ParseMode mode) {
  if (!record.is_object()) throw ParseError("expected a JSON object", "", index);
  ToxiSample s;

  const auto& id = Require(record, "id", index);
  if (id.is_number_unsigned()) {
    s.id = id.get<std::uint64_t>();
  } else if (id.is_number_integer() && id.get<std::int64_t>() >= 0) {
    s.id = static_cast<std::uint64_t>(id.get<std::int64_t>());
  } else {
    throw ParseError("expected a non-negative integer", "id", index);
  }

  s.platform = ReadEnum<Platform>(record, "platform", index, ParsePlatform);
  s.topic = ReadEnum<Topic>(record, "topic", index, ParseTopic);

  const auto& text = Require(record, "text", index);
  if (!text.is_string()) throw ParseError("expected a string", "text", index);
  s.text = text.get<std::string>();

  s.toxic = ReadFlag(record, "toxic", index);
  s.hate = ReadFlag(record, "hate", index);

  const auto& groups = Require(record, "groups", index);
  if (!groups.is_array()) throw ParseError("expected an array", "groups", index);
  for (const auto& g : groups) {
    if (!g.is_string()) throw ParseError("expected group names", "groups", index);
    auto parsed = ParseGroup(g.get_ref<const std::string&>());
    if (!parsed) throw ParseError("unknown group " + g.dump(), "groups", index);
    s.groups.insert(*parsed);
  }

  const auto& expr = Require(record, "expression", index);
  if (expr.is_null() || (expr.is_array() && expr.empty()) ||
      (expr.is_string() && expr.get_ref<const std::string&>().empty())) {
    s.expression.reset();
  } else if (expr.is_string()) {
    s.expression = ParseExpression(expr.get_ref<const std::string&>());
    if (!s.expression) {
      throw ParseError("unknown expression " + expr.dump(), "expression", index);
    }
  } else {
    throw ParseError("expected a string or null", "expression", index);
  }

  if (mode == ParseMode::kStrict) {
    const auto verdict = ValidateHierarchy(s);
    if (!verdict.ok()) throw ParseError(verdict.ToString(), "", index);
  }
  return s;
}

ToxiSample ParseSample(std::string_view line, std::size_t index,
                       ParseMode mode) {
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), "", index);
  }
  return ParseSample(record, index, mode);
}

nlohmann::json ToJson(const ToxiSample& s) {
  nlohmann::json groups = nlohmann::json::array();
  for (Group g : s.groups.members()) groups.push_back(ToString(g));
  nlohmann::json j;
  j["id"] = s.id;
  j["platform"] = ToString(s.platform);
  j["topic"] = ToString(s.topic);
  j["text"] = s.text;
  j["toxic"] = s.toxic ? 1 : 0;
  j["hate"] = s.hate ? 1 : 0;
  j["groups"] = std::move(groups);
  j["expression"] = s.expression ? nlohmann::json(ToString(*s.expression))
                                 : nlohmann::json(nullptr);
  return j;
}

std::vector<ToxiSample> ReadCorpus(std::istream& in, const std::string& source,
                                   ParseMode mode) {
  std::vector<ToxiSample> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header_seen) {
      nlohmann::json header;
      try {
        header = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error&) {
        throw DataError("malformed schema header", source, line_no);
      }
      if (!header.is_object() || !header.contains(kSchemaKey)) {
        throw DataError("first line must be the {\"toxicn_schema\": 1} header",
                        source, line_no);
      }
      if (header[kSchemaKey] != kSchemaVersion) {
        throw DataError("unsupported schema version " +
                            header[kSchemaKey].dump(),
                        source, line_no);
      }
      header_seen = true;
      continue;
    }
    try {
      out.push_back(ParseSample(std::string_view(line), line_no, mode));
    } catch (const ParseError& e) {
      throw DataError(e.what(), source, line_no);
    }
  }
  if (!header_seen) throw DataError("missing schema header", source);
  return out;
}

std::vector<ToxiSample> ReadCorpus(const std::filesystem::path& path,
                                   ParseMode mode) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file", path.string());
  return ReadCorpus(in, path.string(), mode);
}

void WriteCorpus(std::ostream& out, std::span<const ToxiSample> samples) {
  nlohmann::json header;
  header[kSchemaKey] = kSchemaVersion;
  out << header.dump() << '\n';
  for (const auto& s : samples) out << ToJson(s).dump() << '\n';
}

void WriteCorpus(const std::filesystem::path& path,
                 std::span<const ToxiSample> samples) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file", path.string());
  WriteCorpus(out, samples);
}

std::size_t TrainSize(std::size_t n, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ArgumentError("train ratio must lie in (0, 1)");
  }
  // The epsilon absorbs binary representation error of decimal ratios so
  // that exact halves round up.
  const long double x = static_cast<long double>(ratio) * n + 0.5L + 1e-9L;
  return std::min(n, static_cast<std::size_t>(std::floor(x)));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> SplitIndices(
    std::span<const ToxiSample> corpus, const SplitSpec& spec) {
  const std::size_t n = corpus.size();
  if (n < 2) throw ArgumentError("split needs at least 2 samples");
  const std::size_t n_train = TrainSize(n, spec.train_ratio);
  Rng rng(spec.seed, "split");

  std::vector<std::size_t> train, test;
  if (!spec.stratify) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.Shuffle(order);
    train.assign(order.begin(), order.begin() + n_train);
    test.assign(order.begin() + n_train, order.end());
    return {train, test};
  }

  // stratum key: 0 non-toxic, 1 offensive, 2.. hate by expression
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = corpus[i];
    int key = !s.toxic ? 0 : !s.hate ? 1 : 2;
    if (s.hate && s.expression) key += 1 + static_cast<int>(*s.expression);
    strata[key].push_back(i);
  }
  struct Quota {
    int key;
    std::size_t base;
    long double remainder;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (auto& [key, members] : strata) {
    rng.Shuffle(members);
    const long double exact =
        static_cast<long double>(n_train) * members.size() / n;
    const auto base = static_cast<std::size_t>(std::floor(exact));
    quotas.push_back({key, base, exact - base});
    assigned += base;
  }
  std::stable_sort(quotas.begin(), quotas.end(),
                   [](const Quota& a, const Quota& b) {
                     return a.remainder > b.remainder;
                   });
  for (std::size_t i = 0; assigned < n_train; ++i, ++assigned) {
    ++quotas[i % quotas.size()].base;
  }
  for (const auto& q : quotas) {
    const auto& members = strata[q.key];
    train.insert(train.end(), members.begin(), members.begin() + q.base);
    test.insert(test.end(), members.begin() + q.base, members.end());
  }
  rng.Shuffle(train);
  rng.Shuffle(test);
  return {train, test};
}

std::pair<std::vector<ToxiSample>, std::vector<ToxiSample>> SplitDataset(
    std::span<const ToxiSample> corpus, const SplitSpec& spec) {
  auto [train_idx, test_idx] = SplitIndices(corpus, spec);
  std::vector<ToxiSample> train, test;
  train.reserve(train_idx.size());
  test.reserve(test_idx.size());
  for (auto i : train_idx) train.push_back(corpus[i]);
  for (auto i : test_idx) test.push_back(corpus[i]);
  return {std::move(train), std::move(test)};
}

StatsRow& StatsRow::operator+=(const StatsRow& o) {
  non_toxic += o.non_toxic;
  toxic += o.toxic;
  offensive += o.offensive;
  hate += o.hate;
  for (int e = 0; e < kNumExpressions; ++e) {
    hate_by_expression[e] += o.hate_by_expression[e];
  }
  total += o.total;
  chars += o.chars;
  return *this;
}

std::size_t StatsReport::group_total(Group g) const {
  const auto& row = group_expression[static_cast<std::size_t>(g)];
  return row[0] + row[1] + row[2];
}

StatsReport CorpusStats(std::span<const ToxiSample> corpus) {
  std::vector<std::uint64_t> bad;
  for (const auto& s : corpus) {
    if (!ValidateHierarchy(s).ok()) bad.push_back(s.id);
  }
  if (!bad.empty()) {
    std::string ids;
    for (std::size_t i = 0; i < bad.size(); ++i) {
      if (i) ids += ",";
      ids += std::to_string(bad[i]);
    }
    throw DataError("samples violate the label hierarchy: ids " + ids);
  }

  StatsReport r;
  for (const auto& s : corpus) {
    auto& row = r.by_topic[static_cast<std::size_t>(s.topic)];
    ++row.total;
    row.chars += utf8::Length(s.text);
    if (!s.toxic) {
      ++row.non_toxic;
      continue;
    }
    ++row.toxic;
    if (!s.hate) {
      ++row.offensive;
      continue;
    }
    ++row.hate;
    const auto e = static_cast<std::size_t>(*s.expression);
    ++row.hate_by_expression[e];
    for (Group g : s.groups.members()) {
      ++r.group_expression[static_cast<std::size_t>(g)][e];
    }
  }
  for (const auto& row : r.by_topic) r.total += row;
  return r;
}

namespace {

nlohmann::json RowJson(const StatsRow& row) {
  nlohmann::json j;
  j["non_toxic"] = row.non_toxic;
  j["toxic"] = row.toxic;
  j["offensive"] = row.offensive;
  j["hate"] = row.hate;
  for (int e = 0; e < kNumExpressions; ++e) {
    j[std::string("hate_") + std::string(kExpressionNames[e])] =
        row.hate_by_expression[e];
  }
  j["total"] = row.total;
  // two decimals, as a number, so the JSON stays byte-stable
  j["avg_length"] = std::round(row.average_length() * 100.0) / 100.0;
  return j;
}

}  // namespace

nlohmann::json ToJson(const StatsReport& r) {
  nlohmann::json j;
  for (int t = 0; t < kNumTopics; ++t) {
    j["topics"][std::string(kTopicNames[t])] = RowJson(r.by_topic[t]);
  }
  j["total"] = RowJson(r.total);
  for (int g = 0; g < kNumGroups; ++g) {
    auto& node = j["groups"][std::string(kGroupNames[g])];
    for (int e = 0; e < kNumExpressions; ++e) {
      node[std::string(kExpressionNames[e])] = r.group_expression[g][e];
    }
    node["total"] = r.group_total(static_cast<Group>(g));
  }
  return j;
}

std::string FormatStatsTable(const StatsReport& r) {
  std::ostringstream os;
  auto row = [&os](std::string_view name, const StatsRow& x) {
    os << std::left << std::setw(8) << name << std::right << std::setw(8)
       << x.non_toxic << std::setw(8) << x.toxic << std::setw(8) << x.offensive
       << std::setw(8) << x.hate << std::setw(8) << x.hate_by_expression[0]
       << std::setw(8) << x.hate_by_expression[1] << std::setw(8)
       << x.hate_by_expression[2] << std::setw(8) << x.total << std::setw(8)
       << std::fixed << std::setprecision(2) << x.average_length() << '\n';
  };
  os << std::left << std::setw(8) << "topic" << std::right << std::setw(8)
     << "n-tox" << std::setw(8) << "tox" << std::setw(8) << "off"
     << std::setw(8) << "hate" << std::setw(8) << "h-exp" << std::setw(8)
     << "h-imp" << std::setw(8) << "h-rep" << std::setw(8) << "total"
     << std::setw(8) << "avg-len" << '\n';
  for (int t = 0; t < kNumTopics; ++t) row(kTopicNames[t], r.by_topic[t]);
  row("total", r.total);
  os << '\n'
     << std::left << std::setw(14) << "group" << std::right << std::setw(8)
     << "h-exp" << std::setw(8) << "h-imp" << std::setw(8) << "h-rep"
     << std::setw(8) << "total" << '\n';
  for (int g = 0; g < kNumGroups; ++g) {
    const auto& c = r.group_expression[g];
    os << std::left << std::setw(14) << kGroupNames[g] << std::right
       << std::setw(8) << c[0] << std::setw(8) << c[1] << std::setw(8) << c[2]
       << std::setw(8) << r.group_total(static_cast<Group>(g)) << '\n';
  }
  return os.str();
}

}  // namespace toxicn
