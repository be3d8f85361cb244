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

#include "toxicn/normalizer.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "toxicn/utf8.hpp"

namespace toxicn {

namespace {

constexpr std::array<std::u32string_view, 8> kImageMarkers = {
    U"[图片]", U"[图]",    U"[img]", U"[IMG]",
    U"[image]", U"[Image]", U"【图片】", U"［图片］"};

char32_t FoldCompat(char32_t cp) {
  if ((cp >= 0xFF21 && cp <= 0xFF3A) || (cp >= 0xFF41 && cp <= 0xFF5A) ||
      (cp >= 0xFF10 && cp <= 0xFF19) || cp == 0xFF20) {
    return cp - 0xFEE0;
  }
  if (cp == 0x3000) return U' ';
  return cp;
}

bool IsSchemeChar(char32_t cp) {
  return utf8::IsAsciiLetter(cp) || utf8::IsAsciiDigit(cp) || cp == U'+' ||
         cp == U'.' || cp == U'-';
}

bool IsUrlChar(char32_t cp) { return cp >= 0x21 && cp <= 0x7E; }

bool IsMentionChar(char32_t cp) {
  return cp == U'_' || utf8::IsAsciiDigit(cp) || utf8::IsLetter(cp) ||
         utf8::IsHan(cp);
}

char32_t AsciiLower(char32_t cp) {
  return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
}

bool StartsWithWww(std::u32string_view s, std::size_t i) {
  if (i + 4 > s.size()) return false;
  return AsciiLower(s[i]) == U'w' && AsciiLower(s[i + 1]) == U'w' &&
         AsciiLower(s[i + 2]) == U'w' && s[i + 3] == U'.';
}

void RemoveImageMarkers(std::u32string& s) {
  for (auto marker : kImageMarkers) {
    std::size_t pos = 0;
    while ((pos = s.find(marker, pos)) != std::u32string::npos) {
      s.erase(pos, marker.size());
    }
  }
}

// Marks "scheme://..." and "www...." spans for removal.
void RemoveUrls(std::u32string& s) {
  std::vector<bool> drop(s.size(), false);
  for (std::size_t i = 0; i + 2 < s.size(); ++i) {
    if (s[i] != U':' || s[i + 1] != U'/' || s[i + 2] != U'/') continue;
    std::size_t begin = i;
    while (begin > 0 && IsSchemeChar(s[begin - 1])) --begin;
    if (begin == i) continue;
    std::size_t end = i + 3;
    while (end < s.size() && IsUrlChar(s[end])) ++end;
    std::fill(drop.begin() + begin, drop.begin() + end, true);
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!StartsWithWww(s, i)) continue;
    if (i > 0 && (utf8::IsAsciiLetter(s[i - 1]) || utf8::IsAsciiDigit(s[i - 1])))
      continue;
    std::size_t end = i + 4;
    while (end < s.size() && IsUrlChar(s[end])) ++end;
    std::fill(drop.begin() + i, drop.begin() + end, true);
  }
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!drop[i]) out.push_back(s[i]);
  }
  s = std::move(out);
}

void RemoveMentions(std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == U'@' && i + 1 < s.size() && IsMentionChar(s[i + 1])) {
      ++i;
      while (i < s.size() && IsMentionChar(s[i])) ++i;
      continue;
    }
    out.push_back(s[i++]);
  }
  s = std::move(out);
}

void CollapseWhitespace(std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char32_t cp : s) {
    if (utf8::IsWhitespace(cp)) {
      if (!in_space) out.push_back(U' ');
      in_space = true;
    } else {
      out.push_back(cp);
      in_space = false;
    }
  }
  s = std::move(out);
}

void Trim(std::u32string& s) {
  std::size_t b = 0;
  while (b < s.size() && utf8::IsWhitespace(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && utf8::IsWhitespace(s[e - 1])) --e;
  s = s.substr(b, e - b);
}

void Pass(std::u32string& s, const NormalizeConfig& cfg) {
  for (auto& cp : s) cp = FoldCompat(cp);
  RemoveImageMarkers(s);
  if (cfg.strip_urls) RemoveUrls(s);
  if (cfg.strip_mentions) RemoveMentions(s);
  if (cfg.collapse_whitespace) CollapseWhitespace(s);
  Trim(s);
}

}  // namespace

std::u32string NormalizeText(std::u32string_view raw,
                             const NormalizeConfig& cfg) {
  std::u32string cur(raw);
  // Each pass only shrinks or rewrites in place, so this terminates.
  while (true) {
    std::u32string next = cur;
    Pass(next, cfg);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

std::string NormalizeText(std::string_view raw, const NormalizeConfig& cfg) {
  return utf8::Encode(NormalizeText(utf8::Decode(raw), cfg));
}

std::size_t ContentCharCount(std::string_view text) {
  const auto cps = utf8::Decode(text);
  return static_cast<std::size_t>(
      std::count_if(cps.begin(), cps.end(), utf8::IsContent));
}

bool IsSubstantive(std::string_view text, const NormalizeConfig& cfg) {
  if (cfg.min_content_chars <= 0) return true;
  return ContentCharCount(text) >=
         static_cast<std::size_t>(cfg.min_content_chars);
}

std::vector<std::uint64_t> Deduplicate(
    const std::vector<std::pair<std::uint64_t, std::string>>& corpus) {
  std::unordered_set<std::string_view> seen;
  std::vector<std::uint64_t> kept;
  for (const auto& [id, text] : corpus) {
    if (seen.insert(text).second) kept.push_back(id);
  }
  return kept;
}

}  // namespace toxicn
