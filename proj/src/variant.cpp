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

#include "toxicn/variant.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>

#include "toxicn/error.hpp"
#include "toxicn/utf8.hpp"

namespace toxicn {

namespace {

constexpr std::array<std::string_view, 4> kRuleNames = {
    "homophonic", "abbreviation", "code_mixing", "deformation"};

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

char32_t SingleChar(std::string_view s, const std::string& source,
                    std::size_t line) {
  const auto cps = utf8::Decode(s);
  if (cps.size() != 1) {
    throw DataError("expected a single character, got '" + std::string(s) + "'",
                    source, line);
  }
  return cps[0];
}

std::string Str(char32_t c) {
  std::string s;
  utf8::Append(s, c);
  return s;
}

const std::vector<std::string>& RequireReadings(const PinyinTable& table,
                                                char32_t c) {
  const auto* r = table.Readings(c);
  if (r == nullptr || r->empty()) {
    throw ArgumentError("character '" + Str(c) + "' is not in the pinyin table");
  }
  return *r;
}

}  // namespace

std::string_view ToString(VariantRule r) {
  return kRuleNames[static_cast<std::size_t>(r)];
}

std::optional<VariantRule> ParseVariantRule(std::string_view s) {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == s) return static_cast<VariantRule>(i);
  }
  return std::nullopt;
}

std::string_view ToString(Script s) {
  switch (s) {
    case Script::kLatin:
      return "latin";
    case Script::kHan:
      return "han";
    case Script::kOther:
      return "other";
  }
  return "other";
}

PinyinTable PinyinTable::Load(std::istream& in, const std::string& source) {
  PinyinTable table;
  std::string row;
  std::size_t line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty() || row[0] == '#') continue;
    const auto tab = row.find('\t');
    if (tab == std::string::npos) {
      throw DataError("expected char<TAB>syllables", source, line);
    }
    const char32_t ch = SingleChar(row.substr(0, tab), source, line);
    std::vector<std::string> syllables;
    std::string_view rest(row);
    rest.remove_prefix(tab + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      auto syl = Trim(rest.substr(0, comma));
      if (syl.empty() ||
          !std::all_of(syl.begin(), syl.end(),
                       [](char c) { return c >= 'a' && c <= 'z'; })) {
        throw DataError("syllables must be lowercase ASCII, got '" + syl + "'",
                        source, line);
      }
      syllables.push_back(std::move(syl));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (syllables.empty()) throw DataError("no syllables", source, line);
    table.Add(ch, std::move(syllables));
  }
  return table;
}

PinyinTable PinyinTable::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pinyin table", path.string());
  return Load(in, path.string());
}

void PinyinTable::Add(char32_t ch, std::vector<std::string> syllables) {
  readings_[ch] = std::move(syllables);
}

const std::vector<std::string>* PinyinTable::Readings(char32_t ch) const {
  auto it = readings_.find(ch);
  return it == readings_.end() ? nullptr : &it->second;
}

bool PinyinTable::SharesReading(char32_t a, char32_t b) const {
  const auto* ra = Readings(a);
  const auto* rb = Readings(b);
  if (ra == nullptr || rb == nullptr) return false;
  for (const auto& x : *ra) {
    if (std::find(rb->begin(), rb->end(), x) != rb->end()) return true;
  }
  return false;
}

std::u32string PinyinTable::Characters() const {
  std::u32string out;
  out.reserve(readings_.size());
  for (const auto& [ch, r] : readings_) out.push_back(ch);
  std::sort(out.begin(), out.end());
  return out;
}

GlyphTable GlyphTable::Load(std::istream& in, const std::string& source) {
  GlyphTable table;
  std::string row;
  std::size_t line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty() || row[0] == '#') continue;
    const auto tab = row.find('\t');
    if (tab == std::string::npos) {
      throw DataError("expected char<TAB>components", source, line);
    }
    const char32_t ch = SingleChar(row.substr(0, tab), source, line);
    std::u32string components;
    std::string_view rest(row);
    rest.remove_prefix(tab + 1);
    while (true) {
      const auto plus = rest.find('+');
      components.push_back(
          SingleChar(Trim(rest.substr(0, plus)), source, line));
      if (plus == std::string_view::npos) break;
      rest.remove_prefix(plus + 1);
    }
    table.Add(ch, std::move(components));
  }
  table.CheckAcyclic(source);
  return table;
}

GlyphTable GlyphTable::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open glyph table", path.string());
  return Load(in, path.string());
}

void GlyphTable::Add(char32_t ch, std::u32string components) {
  components_[ch] = std::move(components);
}

const std::u32string* GlyphTable::Components(char32_t ch) const {
  auto it = components_.find(ch);
  return it == components_.end() ? nullptr : &it->second;
}

std::u32string GlyphTable::Characters() const {
  std::u32string out;
  for (const auto& [ch, c] : components_) out.push_back(ch);
  std::sort(out.begin(), out.end());
  return out;
}

void GlyphTable::CheckAcyclic(const std::string& source) const {
  // 0 unvisited, 1 on stack, 2 done
  std::unordered_map<char32_t, int> state;
  auto visit = [&](auto&& self, char32_t ch) -> void {
    auto& s = state[ch];
    if (s == 2) return;
    if (s == 1) {
      throw DataError("cyclic decomposition through '" + Str(ch) + "'", source);
    }
    s = 1;
    if (const auto* comps = Components(ch)) {
      for (char32_t c : *comps) self(self, c);
    }
    state[ch] = 2;
  };
  for (char32_t ch : Characters()) visit(visit, ch);
}

std::vector<VariantCandidate> GenerateHomophones(std::string_view term,
                                                 const PinyinTable& table,
                                                 std::u32string_view pool,
                                                 std::size_t limit) {
  const auto chars = utf8::Decode(term);
  std::vector<std::u32string> options(chars.size());
  for (std::size_t i = 0; i < chars.size(); ++i) {
    RequireReadings(table, chars[i]);
    options[i].push_back(chars[i]);
    for (char32_t p : pool) {
      if (p == chars[i] || options[i].find(p) != std::u32string::npos) continue;
      if (table.SharesReading(chars[i], p)) options[i].push_back(p);
    }
  }

  std::vector<VariantCandidate> out;
  std::vector<std::size_t> digit(chars.size(), 0);
  while (true) {
    // odometer increment, last position fastest
    std::size_t pos = chars.size();
    while (pos > 0) {
      --pos;
      if (++digit[pos] < options[pos].size()) break;
      digit[pos] = 0;
      if (pos == 0) return out;
    }
    if (chars.empty()) return out;

    std::u32string variant(chars.size(), U'\0');
    std::string note;
    for (std::size_t i = 0; i < chars.size(); ++i) {
      variant[i] = options[i][digit[i]];
      if (digit[i] != 0) {
        if (!note.empty()) note += ", ";
        note += Str(chars[i]) + "->" + Str(variant[i]);
      }
    }
    out.push_back({utf8::Encode(variant), std::string(term),
                   VariantRule::kHomophonic, note});
    if (limit != 0 && out.size() >= limit) return out;
  }
}

VariantCandidate GenerateAbbreviation(std::string_view term,
                                      const PinyinTable& table) {
  const auto chars = utf8::Decode(term);
  if (chars.empty()) throw ArgumentError("empty term");
  std::string initials;
  std::string note;
  for (char32_t c : chars) {
    const auto& first = RequireReadings(table, c).front();
    initials.push_back(first.front());
    if (!note.empty()) note += ' ';
    note += Str(c) + "(" + first + ")";
  }
  return {initials, std::string(term), VariantRule::kAbbreviation, note};
}

std::vector<VariantCandidate> GenerateCodeMixing(std::string_view term,
                                                 const PinyinTable& table) {
  const auto chars = utf8::Decode(term);
  std::vector<std::size_t> han;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    if (utf8::IsHan(chars[i])) {
      RequireReadings(table, chars[i]);
      han.push_back(i);
    }
  }
  std::vector<VariantCandidate> out;
  if (han.size() < 2 || han.size() > 20) return out;
  const std::uint32_t full = (1u << han.size()) - 1;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    std::string variant;
    std::string note;
    std::size_t k = 0;
    for (std::size_t i = 0; i < chars.size(); ++i) {
      const bool is_han = k < han.size() && han[k] == i;
      if (is_han && (mask >> k) & 1u) {
        const auto& syl = table.Readings(chars[i])->front();
        variant += syl;
        if (!note.empty()) note += ", ";
        note += Str(chars[i]) + "->" + syl;
      } else {
        utf8::Append(variant, chars[i]);
      }
      if (is_han) ++k;
    }
    out.push_back({variant, std::string(term), VariantRule::kCodeMixing, note});
  }
  return out;
}

std::vector<VariantCandidate> GenerateDeformations(std::string_view term,
                                                   const GlyphTable& table) {
  const auto chars = utf8::Decode(term);
  std::vector<VariantCandidate> out;
  std::set<std::string> seen{std::string(term)};
  auto emit = [&](std::u32string v, std::string note) {
    auto s = utf8::Encode(v);
    if (seen.insert(s).second) {
      out.push_back({s, std::string(term), VariantRule::kDeformation,
                     std::move(note)});
    }
  };

  // split one character into its components
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const auto* comps = table.Components(chars[i]);
    if (comps == nullptr) continue;
    std::u32string v = chars.substr(0, i) + *comps + chars.substr(i + 1);
    emit(std::move(v), Str(chars[i]) + "->" + utf8::Encode(*comps));
  }
  // merge a run of components into the character they compose
  const auto composed = table.Characters();
  for (char32_t ch : composed) {
    const auto& comps = *table.Components(ch);
    std::size_t pos = chars.find(comps);
    while (pos != std::u32string::npos) {
      std::u32string v =
          chars.substr(0, pos) + ch + chars.substr(pos + comps.size());
      emit(std::move(v), utf8::Encode(comps) + "->" + Str(ch));
      pos = chars.find(comps, pos + 1);
    }
  }
  return out;
}

CodeMixing DetectCodeMixing(std::string_view token) {
  CodeMixing result;
  bool has_latin = false;
  bool has_han = false;
  for (char32_t c : utf8::Decode(token)) {
    Script script = Script::kOther;
    if (utf8::IsHan(c)) {
      script = Script::kHan;
      has_han = true;
    } else if (utf8::IsAsciiDigit(c) || utf8::IsAsciiLetter(c) ||
               (c >= 0xC0 && c <= 0x24F && utf8::IsLetter(c))) {
      script = Script::kLatin;
      has_latin = true;
    }
    if (result.runs.empty() || result.runs.back().script != script) {
      result.runs.push_back({script, {}});
    }
    utf8::Append(result.runs.back().text, c);
  }
  result.mixed = has_latin && has_han;
  return result;
}

Deformation ExpandDeformation(std::string_view ch, const GlyphTable& table) {
  Deformation d;
  const auto cps = utf8::Decode(ch);
  const std::u32string* comps =
      cps.size() == 1 ? table.Components(cps[0]) : nullptr;
  if (comps == nullptr) {
    d.note = "not covered";
    return d;
  }
  d.covered = true;
  for (char32_t c : *comps) d.characters.push_back(Str(c));
  return d;
}

Deformation ComposeDeformation(const std::vector<std::string>& components,
                               const GlyphTable& table) {
  Deformation d;
  std::u32string query;
  for (const auto& c : components) query += utf8::Decode(c);
  if (!query.empty()) {
    for (char32_t ch : table.Characters()) {
      if (*table.Components(ch) == query) d.characters.push_back(Str(ch));
    }
  }
  d.covered = !d.characters.empty();
  if (!d.covered) d.note = "not covered";
  return d;
}

}  // namespace toxicn
