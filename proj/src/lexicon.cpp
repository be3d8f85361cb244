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

#include "toxicn/lexicon.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "toxicn/error.hpp"
#include "toxicn/normalizer.hpp"
#include "toxicn/utf8.hpp"

namespace toxicn {

namespace {

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "sexism", "racism", "regional_bias", "anti_lgbtq", "general"};
constexpr std::array<std::string_view, 2> kSurfaceNames = {"explicit",
                                                           "implicit"};
constexpr std::array<std::string_view, 8> kRuleTagNames = {
    "none",     "deformation", "homophonic",  "irony",
    "abbreviation", "metaphor", "code_mixing", "borrowed_word"};

std::vector<std::string_view> SplitTabs(std::string_view row) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = row.find('\t', pos);
    out.push_back(row.substr(pos, tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

}  // namespace

std::string_view ToString(Category c) {
  return kCategoryNames[static_cast<std::size_t>(c) - 1];
}
std::string_view ToString(Surface s) {
  return kSurfaceNames[static_cast<std::size_t>(s)];
}
std::string_view ToString(RuleTag r) {
  return kRuleTagNames[static_cast<std::size_t>(r)];
}

std::optional<Category> ParseCategory(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == s) return static_cast<Category>(i + 1);
  }
  if (s.size() == 1 && s[0] >= '1' && s[0] <= '5') {
    return static_cast<Category>(s[0] - '0');
  }
  return std::nullopt;
}

std::optional<Surface> ParseSurface(std::string_view s) {
  for (std::size_t i = 0; i < kSurfaceNames.size(); ++i) {
    if (kSurfaceNames[i] == s) return static_cast<Surface>(i);
  }
  return std::nullopt;
}

std::optional<RuleTag> ParseRuleTag(std::string_view s) {
  for (std::size_t i = 0; i < kRuleTagNames.size(); ++i) {
    if (kRuleTagNames[i] == s) return static_cast<RuleTag>(i);
  }
  return std::nullopt;
}

InsultEntry ParseLexiconRow(std::string_view row, const std::string& source,
                            std::size_t line) {
  const auto cols = SplitTabs(row);
  if (cols.size() < 2 || cols.size() > 4) {
    throw DataError("expected 2-4 tab-separated columns, got " +
                        std::to_string(cols.size()),
                    source, line);
  }
  InsultEntry e;
  e.term = std::string(cols[0]);
  const auto category = ParseCategory(cols[1]);
  if (!category) {
    throw DataError("unknown category '" + std::string(cols[1]) + "'", source,
                    line);
  }
  e.category = *category;
  if (cols.size() > 2) {
    const auto surface = ParseSurface(cols[2]);
    if (!surface) {
      throw DataError("unknown surface '" + std::string(cols[2]) + "'", source,
                      line);
    }
    e.surface = *surface;
  }
  if (cols.size() > 3) {
    const auto tag = ParseRuleTag(cols[3]);
    if (!tag) {
      throw DataError("unknown rule tag '" + std::string(cols[3]) + "'",
                      source, line);
    }
    e.rule_tag = *tag;
  }
  return e;
}

Lexicon::Lexicon() { Build(); }

Lexicon::Lexicon(std::vector<InsultEntry> entries) : entries_(std::move(entries)) {
  std::unordered_map<std::u32string, std::size_t> seen;
  terms_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& e = entries_[i];
    auto term = NormalizeText(utf8::Decode(e.term));
    if (term.empty()) {
      throw DataError("term '" + e.term + "' is empty after normalization");
    }
    e.term = utf8::Encode(term);
    if (!seen.emplace(term, i).second) {
      throw DataError("duplicate term '" + e.term + "'");
    }
    terms_.push_back(std::move(term));
  }
  Build();
}

Lexicon Lexicon::Load(std::istream& in, const std::string& source) {
  std::vector<InsultEntry> entries;
  std::vector<std::size_t> lines;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string row;
  std::size_t line_no = 0;
  while (std::getline(in, row)) {
    ++line_no;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty() || row[0] == '#') continue;
    auto e = ParseLexiconRow(row, source, line_no);
    const auto key = NormalizeText(std::string_view(e.term));
    if (key.empty()) {
      throw DataError("term is empty after normalization", source, line_no);
    }
    auto [it, fresh] = first_line.emplace(key, line_no);
    if (!fresh) {
      throw DataError("duplicate term '" + key + "' (first on line " +
                          std::to_string(it->second) + ")",
                      source, line_no);
    }
    entries.push_back(std::move(e));
  }
  return Lexicon(std::move(entries));
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file", path.string());
  return Load(in, path.string());
}

void Lexicon::Save(std::ostream& out) const {
  for (const auto& e : entries_) {
    out << e.term << '\t' << ToString(e.category) << '\t'
        << ToString(e.surface) << '\t' << ToString(e.rule_tag) << '\n';
  }
}

void Lexicon::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write lexicon file", path.string());
  Save(out);
}

Lexicon Lexicon::With(const std::vector<InsultEntry>& extra) const {
  auto all = entries_;
  all.insert(all.end(), extra.begin(), extra.end());
  return Lexicon(std::move(all));
}

std::optional<std::size_t> Lexicon::Find(std::u32string_view term) const {
  std::int32_t node = 0;
  for (char32_t c : term) {
    node = Child(node, c);
    if (node < 0) return std::nullopt;
  }
  if (nodes_[node].terminal < 0) return std::nullopt;
  return static_cast<std::size_t>(nodes_[node].terminal);
}

bool Lexicon::Contains(std::string_view term) const {
  return Find(utf8::Decode(term)).has_value();
}

std::int32_t Lexicon::Child(std::int32_t node, char32_t c) const {
  const auto& next = nodes_[node].next;
  auto it = std::lower_bound(
      next.begin(), next.end(), c,
      [](const std::pair<char32_t, std::int32_t>& e, char32_t x) {
        return e.first < x;
      });
  if (it == next.end() || it->first != c) return -1;
  return it->second;
}

std::int32_t Lexicon::Step(std::int32_t node, char32_t c) const {
  while (true) {
    const auto child = Child(node, c);
    if (child >= 0) return child;
    if (node == 0) return 0;
    node = nodes_[node].fail;
  }
}

void Lexicon::Build() {
  nodes_.assign(1, Node{});
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    std::int32_t node = 0;
    for (char32_t c : terms_[i]) {
      auto child = Child(node, c);
      if (child < 0) {
        child = static_cast<std::int32_t>(nodes_.size());
        auto& next = nodes_[node].next;
        auto it = std::lower_bound(
            next.begin(), next.end(), c,
            [](const std::pair<char32_t, std::int32_t>& e, char32_t x) {
              return e.first < x;
            });
        next.insert(it, {c, child});
        nodes_.emplace_back();
      }
      node = child;
    }
    nodes_[node].terminal = static_cast<std::int32_t>(i);
  }

  // Breadth-first so that every fail target is finished before its users.
  std::deque<std::int32_t> queue;
  for (const auto& [c, child] : nodes_[0].next) {
    nodes_[child].fail = 0;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    for (const auto& [c, child] : nodes_[node].next) {
      const auto fail = Step(nodes_[node].fail, c);
      nodes_[child].fail = fail;
      nodes_[child].dict_link =
          nodes_[fail].terminal >= 0 ? fail : nodes_[fail].dict_link;
      queue.push_back(child);
    }
  }
}

std::vector<LexiconMatch> Lexicon::FindMatches(std::u32string_view text) const {
  std::vector<LexiconMatch> out;
  std::int32_t node = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    node = Step(node, text[i]);
    auto hit = nodes_[node].terminal >= 0 ? node : nodes_[node].dict_link;
    while (hit >= 0) {
      const auto entry = static_cast<std::size_t>(nodes_[hit].terminal);
      out.push_back({i + 1 - terms_[entry].size(), i + 1, entry});
      hit = nodes_[hit].dict_link;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LexiconMatch& a, const LexiconMatch& b) {
              if (a.start != b.start) return a.start < b.start;
              return a.length() > b.length();
            });
  return out;
}

std::vector<LexiconMatch> Lexicon::FindMatches(std::string_view text) const {
  return FindMatches(utf8::Decode(text));
}

std::vector<std::uint8_t> Lexicon::TokenCategories(
    std::u32string_view text) const {
  std::vector<std::uint8_t> category(text.size(), 0);
  std::vector<std::size_t> best_len(text.size(), 0);
  for (const auto& m : FindMatches(text)) {
    const auto cat = static_cast<std::uint8_t>(entries_[m.entry].category);
    for (std::size_t i = m.start; i < m.end; ++i) {
      if (m.length() > best_len[i] ||
          (m.length() == best_len[i] && cat < category[i])) {
        best_len[i] = m.length();
        category[i] = cat;
      }
    }
  }
  return category;
}

std::vector<std::uint8_t> Lexicon::TokenCategories(std::string_view text) const {
  return TokenCategories(utf8::Decode(text));
}

}  // namespace toxicn
