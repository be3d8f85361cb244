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

#include "toxicn/error.hpp"
#include "toxicn/random.hpp"
#include "toxicn/utf8.hpp"
#include "toxicn/variant.hpp"

using namespace toxicn;

namespace {

const PinyinTable& Pinyin() {
  static const PinyinTable t = PinyinTable::Load(std::string(TOXICN_RESOURCE_DIR) + "/pinyin.tsv");
  return t;
}

const GlyphTable& Glyphs() {
  static const GlyphTable t = GlyphTable::Load(std::string(TOXICN_RESOURCE_DIR) + "/glyph.tsv");
  return t;
}

std::vector<std::string> Variants(const std::vector<VariantCandidate>& v) {
  std::vector<std::string> out;
  for (const auto& c : v) out.push_back(c.variant);
  return out;
}

bool Contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("homophones from the shipped table") {
  CHECK(Contains(Variants(GenerateHomophones("南蛮", Pinyin(), U"满")), "南满"));
  CHECK(Contains(Variants(GenerateHomophones("南蛮", Pinyin(), Pinyin().Characters())), "南满"));
}

TEST_CASE("homophones over a hand-built pool") {
  PinyinTable t;
  t.Add(U'蛮', {"man"});
  t.Add(U'满', {"man"});
  t.Add(U'慢', {"man"});
  t.Add(U'黑', {"hei"});
  auto v = Variants(GenerateHomophones("蛮", t, U"满慢黑"));
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<std::string>{"慢", "满"});
  CHECK(GenerateHomophones("黑", t, U"").empty());
  CHECK(GenerateHomophones("黑", t, U"蛮满").empty());
}

TEST_CASE("homophone limit") {
  CHECK(GenerateHomophones("南蛮", Pinyin(), Pinyin().Characters(), 3).size() == 3);
}

TEST_CASE("abbreviations") {
  CHECK(GenerateAbbreviation("同性恋", Pinyin()).variant == "txl");
  CHECK(GenerateAbbreviation("黑", Pinyin()).variant == "h");
  CHECK(GenerateAbbreviation("小仙女", Pinyin()).variant == "xxn");
  CHECK(GenerateAbbreviation("同性恋", Pinyin()).rule == VariantRule::kAbbreviation);
}

TEST_CASE("code mixing detection") {
  const CodeMixing m = DetectCodeMixing("ni哥");
  CHECK(m.mixed);
  REQUIRE(m.runs.size() == 2);
  CHECK(m.runs[0] == ScriptRun{Script::kLatin, "ni"});
  CHECK(m.runs[1] == ScriptRun{Script::kHan, "哥"});
  CHECK_FALSE(DetectCodeMixing("你好").mixed);
  CHECK_FALSE(DetectCodeMixing("txl").mixed);
}

TEST_CASE("code mixing generation yields mixed strings") {
  const auto v = GenerateCodeMixing("尼哥", Pinyin());
  CHECK(Contains(Variants(v), "ni哥"));
  for (const auto& c : v) CHECK(DetectCodeMixing(c.variant).mixed);
}

TEST_CASE("deformation expand and compose") {
  const Deformation e = ExpandDeformation("默", Glyphs());
  CHECK(e.covered);
  CHECK(e.characters == std::vector<std::string>{"黑", "犬"});
  const Deformation c = ComposeDeformation({"黑", "犬"}, Glyphs());
  CHECK(c.covered);
  CHECK(c.characters == std::vector<std::string>{"默"});
  const Deformation one = ExpandDeformation("一", Glyphs());
  CHECK_FALSE(one.covered);
  CHECK(one.note == "not covered");
  CHECK(Contains(Variants(GenerateDeformations("默", Glyphs())), "黑犬"));
}

TEST_CASE("glyph tables reject cycles") {
  std::istringstream in("甲\t乙+丙\n乙\t甲+丁\n");
  CHECK_THROWS_AS(GlyphTable::Load(in, "cyc.tsv"), DataError);
}

TEST_CASE("compose inverts expand for every table entry") {
  for (char32_t ch : Glyphs().Characters()) {
    const std::string s = utf8::Encode(std::u32string(1, ch));
    const Deformation e = ExpandDeformation(s, Glyphs());
    REQUIRE(e.covered);
    const Deformation c = ComposeDeformation(e.characters, Glyphs());
    CHECK(Contains(c.characters, s));
  }
}

TEST_CASE("homophones keep the term length") {
  Rng rng(4);
  const std::u32string chars = Pinyin().Characters();
  for (int round = 0; round < 200; ++round) {
    std::u32string term;
    for (std::uint64_t n = 1 + rng.Below(3); n > 0; --n) term += chars[rng.Below(chars.size())];
    for (const auto& v : GenerateHomophones(utf8::Encode(term), Pinyin(), chars, 20)) {
      CHECK(utf8::Length(v.variant) == term.size());
      CHECK(v.variant != utf8::Encode(term));
    }
  }
}

TEST_CASE("single-script strings are never code-mixed") {
  Rng rng(6);
  const std::u32string latin = U"abcdefghijklmnopqrstuvwxyzABCXYZ";
  const std::u32string han = U"你好老黑蛆蠢驴女拳南蛮满同性恋";
  for (int round = 0; round < 10000; ++round) {
    const std::u32string& alphabet = round % 2 == 0 ? latin : han;
    std::u32string s;
    for (std::uint64_t n = 1 + rng.Below(8); n > 0; --n) s += alphabet[rng.Below(alphabet.size())];
    REQUIRE_FALSE(DetectCodeMixing(utf8::Encode(s)).mixed);
  }
}

TEST_CASE("only the four generative rules exist") {
  CHECK(ParseVariantRule("homophonic").has_value());
  CHECK(ParseVariantRule("abbreviation").has_value());
  CHECK(ParseVariantRule("code_mixing").has_value());
  CHECK(ParseVariantRule("deformation").has_value());
  CHECK_FALSE(ParseVariantRule("irony").has_value());
  CHECK_FALSE(ParseVariantRule("metaphor").has_value());
  CHECK_FALSE(ParseVariantRule("borrowed_word").has_value());
  static_assert(static_cast<int>(VariantRule::kDeformation) == 3);
}
