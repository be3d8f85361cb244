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

#ifndef TOXICN_VARIANT_HPP_
#define TOXICN_VARIANT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace toxicn {

// Toneless pinyin readings per Han character, most common reading first.
// Resource format: "char<TAB>syllable[,syllable...]" with '#' comments.
class PinyinTable {
 public:
  PinyinTable() = default;
  static PinyinTable Load(const std::filesystem::path& path);
  static PinyinTable Load(std::istream& in, const std::string& source);

  void Add(char32_t ch, std::vector<std::string> syllables);
  // nullptr when the character is not covered.
  const std::vector<std::string>* Readings(char32_t ch) const;
  bool Contains(char32_t ch) const { return readings_.count(ch) != 0; }
  bool SharesReading(char32_t a, char32_t b) const;
  std::size_t size() const { return readings_.size(); }
  // Every covered character in code point order; the default homophone pool.
  std::u32string Characters() const;

 private:
  std::unordered_map<char32_t, std::vector<std::string>> readings_;
};

// Glyph decomposition of characters into component characters.
// Resource format: "char<TAB>component[+component...]".
class GlyphTable {
 public:
  GlyphTable() = default;
  // Throws DataError on malformed rows or cyclic decompositions.
  static GlyphTable Load(const std::filesystem::path& path);
  static GlyphTable Load(std::istream& in, const std::string& source);

  void Add(char32_t ch, std::u32string components);
  const std::u32string* Components(char32_t ch) const;
  std::size_t size() const { return components_.size(); }
  // Characters in code point order.
  std::u32string Characters() const;

 private:
  void CheckAcyclic(const std::string& source) const;

  std::unordered_map<char32_t, std::u32string> components_;
};

// Rules that can be applied mechanically. Irony, metaphor and borrowed words
// need world knowledge and exist only as lexicon tags.
enum class VariantRule : std::uint8_t {
  kHomophonic,
  kAbbreviation,
  kCodeMixing,
  kDeformation,
};

std::string_view ToString(VariantRule r);
std::optional<VariantRule> ParseVariantRule(std::string_view s);

// A proposed variant, for human review before it enters a lexicon.
struct VariantCandidate {
  std::string variant;
  std::string source_term;
  VariantRule rule = VariantRule::kHomophonic;
  std::string note;

  friend bool operator==(const VariantCandidate&,
                         const VariantCandidate&) = default;
};

// Every string obtained by replacing at least one character of `term` with a
// pool character that shares a toneless reading with it. Pool characters
// missing from the table are ignored. Order: positions vary like an odometer
// (last position fastest), alternatives in pool order. `limit` = 0 means no
// limit. Throws ArgumentError naming a term character missing from the table.
std::vector<VariantCandidate> GenerateHomophones(std::string_view term,
                                                 const PinyinTable& table,
                                                 std::u32string_view pool,
                                                 std::size_t limit = 0);

// Initials of the first-listed reading of each character: 同性恋 -> txl.
VariantCandidate GenerateAbbreviation(std::string_view term,
                                      const PinyinTable& table);

// Replaces every non-empty proper subset of the Han characters with their
// first reading (尼哥 -> ni哥, 尼ge). Needs at least two Han characters;
// otherwise returns nothing.
std::vector<VariantCandidate> GenerateCodeMixing(std::string_view term,
                                                 const PinyinTable& table);

// Splits decomposable characters into their components (默 -> 黑犬) and
// merges adjacent component runs into the composed character (黑犬 -> 默).
std::vector<VariantCandidate> GenerateDeformations(std::string_view term,
                                                   const GlyphTable& table);

enum class Script : std::uint8_t { kLatin, kHan, kOther };
std::string_view ToString(Script s);

struct ScriptRun {
  Script script = Script::kOther;
  std::string text;
  friend bool operator==(const ScriptRun&, const ScriptRun&) = default;
};

struct CodeMixing {
  bool mixed = false;
  std::vector<ScriptRun> runs;
};

// Mixed iff the token has both a Latin run (letters or digits) and a Han run.
CodeMixing DetectCodeMixing(std::string_view token);

struct Deformation {
  bool covered = false;
  std::vector<std::string> characters;
  std::string note;
};

Deformation ExpandDeformation(std::string_view ch, const GlyphTable& table);
Deformation ComposeDeformation(const std::vector<std::string>& components,
                               const GlyphTable& table);

}  // namespace toxicn

#endif  // TOXICN_VARIANT_HPP_
