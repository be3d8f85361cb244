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

#ifndef TOXICN_UTF8_HPP_
#define TOXICN_UTF8_HPP_

#include <string>
#include <string_view>

namespace toxicn::utf8 {

// Decodes UTF-8 into code points. Ill-formed sequences decode to U+FFFD, one
// replacement per offending byte.
std::u32string Decode(std::string_view bytes);
std::string Encode(std::u32string_view cps);
void Append(std::string& out, char32_t cp);

// Number of code points.
std::size_t Length(std::string_view bytes);

bool IsWhitespace(char32_t cp);
// CJK unified ideographs including extensions and compatibility block.
bool IsHan(char32_t cp);
bool IsAsciiLetter(char32_t cp);
bool IsAsciiDigit(char32_t cp);
// Letters from the scripts that show up in the corpus: Latin, Greek,
// Cyrillic, kana, hangul.
bool IsLetter(char32_t cp);
// Emoji, pictographs and their joiners/modifiers.
bool IsEmoji(char32_t cp);
// ASCII, general and CJK punctuation plus full-width forms of punctuation.
bool IsPunctuation(char32_t cp);

// Han ideographs, letters and digits.
inline bool IsContent(char32_t cp) {
  return IsHan(cp) || IsLetter(cp) || IsAsciiDigit(cp);
}

}  // namespace toxicn::utf8

#endif  // TOXICN_UTF8_HPP_
