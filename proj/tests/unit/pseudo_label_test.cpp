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
#include <sstream>

#include <doctest.h>

#include "toxicn/pseudo_label.hpp"
#include "toxicn/random.hpp"
#include "toxicn/utf8.hpp"

using namespace toxicn;

namespace {

std::vector<Document> Docs(const std::vector<std::string>& texts) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back({i + 1, texts[i]});
  return docs;
}

const CandidateTerm* FindCandidate(const std::vector<CandidateTerm>& c, const std::string& term) {
  for (const auto& x : c) {
    if (x.term == term) return &x;
  }
  return nullptr;
}

std::size_t CountToxic(const std::vector<PseudoLabeledSample>& labels) {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const auto& l) { return l.toxic; }));
}

}  // namespace

TEST_CASE("a document with a lexicon term is pseudo-toxic") {
  const auto docs = Docs({"今天天气很好", "你这个蠢驴", "我们去吃饭"});
  const auto labels = PseudoLabel(docs, Lexicon({{"蠢驴"}}));
  REQUIRE(labels.size() == 3);
  CHECK_FALSE(labels[0].toxic);
  CHECK(labels[1].toxic);
  CHECK(labels[1].matches.size() == 1);
  CHECK_FALSE(labels[2].toxic);
  CHECK(labels[1].id == 2);
}

TEST_CASE("an empty lexicon labels nothing") {
  const auto labels = PseudoLabel(Docs({"你这个蠢驴", "老黑"}), Lexicon());
  CHECK(CountToxic(labels) == 0);
}

TEST_CASE("candidates from the ten-text fixture") {
  // 老黑 appears in four pseudo-toxic texts and no clean one.
  const auto docs = Docs({"蠢驴老黑滚", "老黑蠢驴", "这个蠢驴老黑", "蠢驴又是老黑", "蠢驴真烦",
                          "今天天气不错", "我们去吃饭吧", "这部电影很好看", "明天要下雨了",
                          "大家早点休息"});
  const Lexicon lex({{"蠢驴"}});
  const auto labels = PseudoLabel(docs, lex);
  CHECK(CountToxic(labels) == 5);
  CandidateParams params;
  params.min_freq = 3;
  params.min_score = 3.0;
  const auto c = ExtractCandidates(labels, docs, lex, params);
  const CandidateTerm* t = FindCandidate(c, "老黑");
  REQUIRE(t != nullptr);
  CHECK(t->toxic_freq == 4);
  CHECK(t->clean_freq == 0);
  CHECK(t->score() == 5.0);
  // The lexicon term and n-grams inside its matches never surface.
  CHECK(FindCandidate(c, "蠢驴") == nullptr);
  CHECK(FindCandidate(c, "蠢") == nullptr);
  CHECK(FindCandidate(c, "驴") == nullptr);
  for (const auto& x : c) {
    CHECK(x.toxic_freq >= 3);
    CHECK(x.score() >= 3.0);
  }
  for (std::size_t i = 1; i < c.size(); ++i) {
    CHECK((c[i - 1].score() > c[i].score() ||
           (c[i - 1].score() == c[i].score() && c[i - 1].toxic_freq >= c[i].toxic_freq)));
  }
}

TEST_CASE("a term spread evenly across both sets is not a candidate") {
  const auto docs = Docs({"蠢驴说好的", "蠢驴说好的吧", "蠢驴说好的呀", "好的谢谢", "好的明白",
                          "好的收到"});
  const Lexicon lex({{"蠢驴"}});
  CandidateParams params;
  params.min_freq = 3;
  params.min_score = 3.0;
  const auto c = ExtractCandidates(PseudoLabel(docs, lex), docs, lex, params);
  CHECK(FindCandidate(c, "好的") == nullptr);
  CHECK(FindCandidate(c, "说好") != nullptr);
}

TEST_CASE("an empty accept list gives one pass") {
  const auto docs = Docs({"你这个蠢驴", "老黑", "你好"});
  const Lexicon lex({{"蠢驴"}});
  const FixpointResult r = IterateToFixpoint(docs, lex, {});
  CHECK(r.iterations == 1);
  CHECK(r.labels == PseudoLabel(docs, lex));
  CHECK(r.toxic_counts == std::vector<std::size_t>{1});
}

TEST_CASE("two-stage fixture needs three passes") {
  const auto docs = Docs({"蠢驴老黑", "蠢驴老黑来了", "老黑黑蛆", "老黑是黑蛆", "黑蛆滚开",
                          "今天天气很好"});
  CandidateParams params;
  params.min_freq = 2;
  params.min_score = 1.0;
  const FixpointResult r =
      IterateToFixpoint(docs, Lexicon({{"蠢驴"}}), {{"老黑"}, {"黑蛆"}}, params);
  CHECK(r.iterations == 3);
  CHECK(r.toxic_counts == std::vector<std::size_t>{2, 4, 5});
  REQUIRE(r.added.size() == 3);
  CHECK(r.added[0] == std::vector<std::string>{"老黑"});
  CHECK(r.added[1] == std::vector<std::string>{"黑蛆"});
  CHECK(r.added[2].empty());
  CHECK(r.lexicon.size() == 3);
}

TEST_CASE("accept lists take bare terms or lexicon rows") {
  std::istringstream in("# reviewed\n老黑\n黑蛆\tracism\timplicit\tmetaphor\n");
  const auto a = LoadAcceptList(in, "accept.txt");
  REQUIRE(a.size() == 2);
  CHECK(a[0].category == Category::kGeneral);
  CHECK(a[1].category == Category::kRacism);
  CHECK(a[1].rule_tag == RuleTag::kMetaphor);
}

TEST_CASE("pseudo labels agree with substring search on fuzz texts") {
  Rng rng(12);
  const std::u32string alphabet = U"老黑蛆蠢驴好的ab";
  std::vector<InsultEntry> entries = {{"蠢驴"}, {"老黑"}, {"ab"}, {"黑蛆好"}};
  const Lexicon lex(entries);
  std::vector<Document> docs;
  for (std::uint64_t i = 0; i < 500; ++i) {
    std::u32string s;
    for (std::uint64_t n = rng.Below(12); n > 0; --n) s += alphabet[rng.Below(alphabet.size())];
    docs.push_back({i, utf8::Encode(s)});
  }
  const auto labels = PseudoLabel(docs, lex);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    bool any = false;
    for (const auto& e : entries) any = any || docs[i].text.find(e.term) != std::string::npos;
    CHECK(labels[i].toxic == any);
  }
}

TEST_CASE("fixpoint runs are monotone and stable") {
  Rng rng(13);
  const std::u32string alphabet = U"甲乙丙丁戊己庚辛";
  for (int round = 0; round < 40; ++round) {
    std::vector<Document> docs;
    for (std::uint64_t i = 0; i < 60; ++i) {
      std::u32string s;
      for (std::uint64_t n = 2 + rng.Below(6); n > 0; --n) s += alphabet[rng.Below(alphabet.size())];
      docs.push_back({i, utf8::Encode(s)});
    }
    std::vector<InsultEntry> accept;
    for (char32_t a : alphabet) {
      for (char32_t b : alphabet) {
        if (rng.Below(6) == 0) accept.push_back({utf8::Encode(std::u32string{a, b})});
      }
    }
    const Lexicon seed({{utf8::Encode(std::u32string{alphabet[0], alphabet[1], alphabet[2]})}});
    CandidateParams params;
    params.min_freq = 2;
    params.min_score = 1.0;
    const FixpointResult r = IterateToFixpoint(docs, seed, accept, params);
    CHECK(std::is_sorted(r.toxic_counts.begin(), r.toxic_counts.end()));
    CHECK(r.iterations == r.toxic_counts.size());
    CHECK(r.labels == PseudoLabel(docs, r.lexicon));

    const FixpointResult again = IterateToFixpoint(docs, r.lexicon, accept, params);
    CHECK(again.iterations == 1);
    CHECK(again.labels == r.labels);
    CHECK(again.lexicon.entries() == r.lexicon.entries());
  }
}
