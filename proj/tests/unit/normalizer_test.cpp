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

#include <set>

#include <doctest.h>

#include "toxicn/normalizer.hpp"
#include "toxicn/random.hpp"
#include "toxicn/utf8.hpp"

using namespace toxicn;

TEST_CASE("mentions, urls and extra spaces are removed") {
  CHECK(NormalizeText("@user1 你好   http://a.b/c") == "你好");
  CHECK(NormalizeText("看这个 https://example.com/x?y=1 好吧") == "看这个 好吧");
  CHECK(NormalizeText("www.example.com 广告") == "广告");
}

TEST_CASE("emoji are kept") { CHECK(NormalizeText("真棒👍") == "真棒👍"); }

TEST_CASE("a bare at sign is not a mention") {
  CHECK(NormalizeText("@ 大家好") == "@ 大家好");
  CHECK(NormalizeText("你@某人 好") == "你 好");
  CHECK(NormalizeText("@某人，你好") == "，你好");
}

TEST_CASE("newline runs collapse to one space") {
  CHECK(NormalizeText("我靠！\n\n我们居然输了。") == "我靠！ 我们居然输了。");
}

TEST_CASE("full-width letters and digits fold to ASCII") {
  CHECK(NormalizeText("ＴＸＬ１２３") == "TXL123");
  CHECK(NormalizeText("你　好") == "你 好");
}

TEST_CASE("substantive threshold") {
  CHECK_FALSE(IsSubstantive("啊啊"));
  CHECK(IsSubstantive("河南人经常偷井盖"));
  CHECK_FALSE(IsSubstantive(""));
  CHECK(ContentCharCount("ab12！！👍") == 4);
  NormalizeConfig cfg;
  cfg.min_content_chars = 2;
  CHECK(IsSubstantive("啊啊", cfg));
}

TEST_CASE("deduplication keeps first occurrences") {
  CHECK(Deduplicate({{1, "a b"}, {2, "a b"}, {3, "c"}}) == std::vector<std::uint64_t>{1, 3});
  CHECK(Deduplicate({{1, "x"}, {2, "y"}, {3, "z"}}) == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(Deduplicate({{1, "x"}, {2, "X"}}) == std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("deduplication matches pairwise comparison") {
  Rng rng(5);
  const std::vector<std::string> atoms = {"x", "X", "好", "a", " "};
  std::vector<std::pair<std::uint64_t, std::string>> corpus;
  for (std::uint64_t id = 1; id <= 100; ++id) {
    std::string s;
    for (std::uint64_t k = rng.Below(3); k > 0; --k) s += atoms[rng.Below(atoms.size())];
    corpus.emplace_back(id, s);
  }
  std::vector<std::uint64_t> expected;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j) seen = seen || corpus[j].second == corpus[i].second;
    if (!seen) expected.push_back(corpus[i].first);
  }
  CHECK(Deduplicate(corpus) == expected);
}

TEST_CASE("normalization properties on fuzzed strings") {
  const std::u32string alphabet =
      U"ab:/.@ \n\t　ＡＢ１２！。，你好老黑👍😀#http s w";
  const std::vector<std::u32string> chunks = {U"http://", U"https://", U"@某人", U"www.", U"  "};
  Rng rng(11);
  for (int round = 0; round < 10000; ++round) {
    std::u32string s;
    for (std::uint64_t k = rng.Below(30); k > 0; --k) {
      if (rng.Below(6) == 0) {
        s += chunks[rng.Below(chunks.size())];
      } else {
        s += alphabet[rng.Below(alphabet.size())];
      }
    }
    const std::u32string once = NormalizeText(std::u32string_view(s));
    REQUIRE(NormalizeText(std::u32string_view(once)) == once);

    for (char32_t c : s) {
      if (utf8::IsEmoji(c)) CHECK(once.find(c) != std::u32string::npos);
    }
    for (std::size_t i = 0; i + 1 < once.size(); ++i) {
      CHECK_FALSE((utf8::IsWhitespace(once[i]) && utf8::IsWhitespace(once[i + 1])));
    }
    CHECK(once.find(U"http://") == std::u32string::npos);
    CHECK(once.find(U"https://") == std::u32string::npos);
    // A mention is '@' followed by a name character; a bare '@' is text.
    for (std::size_t i = 0; i + 1 < once.size(); ++i) {
      if (once[i] != U'@') continue;
      const char32_t next = once[i + 1];
      CHECK_FALSE((utf8::IsLetter(next) || utf8::IsHan(next) || utf8::IsAsciiDigit(next) ||
                   next == U'_'));
    }
  }
}
