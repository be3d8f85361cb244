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

#ifndef TOXICN_LEXICON_HPP_
#define TOXICN_LEXICON_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace toxicn {

// Insult categories. Id 0 is reserved for "not part of any insult".
enum class Category : std::uint8_t {
  kSexism = 1,
  kRacism = 2,
  kRegionalBias = 3,
  kAntiLgbtq = 4,
  kGeneral = 5,
};
inline constexpr int kNumCategories = 5;

enum class Surface : std::uint8_t { kExplicit, kImplicit };

enum class RuleTag : std::uint8_t {
  kNone,
  kDeformation,
  kHomophonic,
  kIrony,
  kAbbreviation,
  kMetaphor,
  kCodeMixing,
  kBorrowedWord,
};

std::string_view ToString(Category c);
std::string_view ToString(Surface s);
std::string_view ToString(RuleTag r);
// Accepts the names above or, for categories, the numeric id.
std::optional<Category> ParseCategory(std::string_view s);
std::optional<Surface> ParseSurface(std::string_view s);
std::optional<RuleTag> ParseRuleTag(std::string_view s);

struct InsultEntry {
  std::string term;
  Category category = Category::kGeneral;
  Surface surface = Surface::kExplicit;
  RuleTag rule_tag = RuleTag::kNone;

  friend bool operator==(const InsultEntry&, const InsultEntry&) = default;
};

// Occurrence of entry `entry` at code point offsets [start, end).
struct LexiconMatch {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t entry = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const LexiconMatch&, const LexiconMatch&) = default;
};

// Parses one TSV row "term<TAB>category[<TAB>surface[<TAB>rule_tag]]".
// Missing surface/rule_tag default to explicit/none. Throws DataError.
InsultEntry ParseLexiconRow(std::string_view row, const std::string& source,
                            std::size_t line);

// Immutable insult collection with an Aho-Corasick automaton over the
// normalized terms. Matching works on code points.
class Lexicon {
 public:
  Lexicon();
  // Normalizes every term; throws DataError on empty or duplicate terms.
  explicit Lexicon(std::vector<InsultEntry> entries);

  static Lexicon Load(const std::filesystem::path& path);
  static Lexicon Load(std::istream& in, const std::string& source);
  void Save(std::ostream& out) const;
  void Save(const std::filesystem::path& path) const;

  // Copy with `extra` appended (same validation as the constructor).
  Lexicon With(const std::vector<InsultEntry>& extra) const;

  const std::vector<InsultEntry>& entries() const { return entries_; }
  const InsultEntry& entry(std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  // Lookup of an already-normalized term.
  std::optional<std::size_t> Find(std::u32string_view term) const;
  bool Contains(std::string_view term) const;

  // Every occurrence of every term (overlaps included), ordered by start
  // ascending then length descending.
  std::vector<LexiconMatch> FindMatches(std::u32string_view text) const;
  std::vector<LexiconMatch> FindMatches(std::string_view text) const;

  // Per code point category id in 0..5: the category of the longest match
  // covering the position, ties to the smaller id; 0 when uncovered.
  std::vector<std::uint8_t> TokenCategories(std::u32string_view text) const;
  std::vector<std::uint8_t> TokenCategories(std::string_view text) const;

 private:
  struct Node {
    std::vector<std::pair<char32_t, std::int32_t>> next;  // sorted by char
    std::int32_t fail = 0;
    std::int32_t terminal = -1;   // entry index ending here
    std::int32_t dict_link = -1;  // nearest terminal node on the fail chain
  };

  void Build();
  std::int32_t Child(std::int32_t node, char32_t c) const;
  std::int32_t Step(std::int32_t node, char32_t c) const;

  std::vector<InsultEntry> entries_;
  std::vector<std::u32string> terms_;  // decoded normalized terms
  std::vector<Node> nodes_;
};

}  // namespace toxicn

#endif  // TOXICN_LEXICON_HPP_
