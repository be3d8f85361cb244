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

#include "toxicn/utf8.hpp"

namespace toxicn::utf8 {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool InRange(char32_t cp, char32_t lo, char32_t hi) {
  return cp >= lo && cp <= hi;
}

}  // namespace

std::u32string Decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok || cp < min || cp > 0x10FFFF || InRange(cp, 0xD800, 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void Append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string Encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (char32_t cp : cps) Append(out, cp);
  return out;
}

std::size_t Length(std::string_view bytes) {
  std::size_t count = 0;
  for (char c : bytes) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
  }
  return count;
}

bool IsWhitespace(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return InRange(cp, 0x2000, 0x200A);
  }
}

bool IsHan(char32_t cp) {
  return InRange(cp, 0x4E00, 0x9FFF) || InRange(cp, 0x3400, 0x4DBF) ||
         InRange(cp, 0xF900, 0xFAFF) || InRange(cp, 0x20000, 0x2A6DF) ||
         InRange(cp, 0x2A700, 0x2EBEF) || InRange(cp, 0x30000, 0x3134F) ||
         cp == 0x3007;
}

bool IsAsciiLetter(char32_t cp) {
  return InRange(cp, 'a', 'z') || InRange(cp, 'A', 'Z');
}

bool IsAsciiDigit(char32_t cp) { return InRange(cp, '0', '9'); }

bool IsLetter(char32_t cp) {
  if (IsAsciiLetter(cp)) return true;
  if (InRange(cp, 0xC0, 0x24F)) return cp != 0xD7 && cp != 0xF7;
  return InRange(cp, 0x370, 0x3FF) || InRange(cp, 0x400, 0x52F) ||
         InRange(cp, 0x3041, 0x3096) || InRange(cp, 0x30A1, 0x30FA) ||
         InRange(cp, 0xAC00, 0xD7A3) || InRange(cp, 0x1100, 0x11FF);
}

bool IsEmoji(char32_t cp) {
  return InRange(cp, 0x1F000, 0x1FAFF) || InRange(cp, 0x2600, 0x27BF) ||
         InRange(cp, 0x2300, 0x23FF) || InRange(cp, 0x2B00, 0x2BFF) ||
         InRange(cp, 0xFE00, 0xFE0F) || InRange(cp, 0x1F3FB, 0x1F3FF) ||
         InRange(cp, 0xE0020, 0xE007F) || cp == 0x200D || cp == 0x20E3 ||
         cp == 0x00A9 || cp == 0x00AE || cp == 0x203C || cp == 0x2049 ||
         cp == 0x2122 || cp == 0x2139 || InRange(cp, 0x2194, 0x21AA) ||
         cp == 0x24C2 || cp == 0x25B6 || cp == 0x25C0 ||
         InRange(cp, 0x25AA, 0x25AB) || InRange(cp, 0x25FB, 0x25FE) ||
         cp == 0x3030 || cp == 0x303D || cp == 0x3297 || cp == 0x3299;
}

bool IsPunctuation(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  if (cp == 0x3030 || cp == 0x303D) return false;  // emoji presentation
  return InRange(cp, 0xA1, 0xBF) || InRange(cp, 0x2010, 0x2027) ||
         InRange(cp, 0x2030, 0x205E) || InRange(cp, 0x3001, 0x3003) ||
         InRange(cp, 0x3008, 0x301F) || InRange(cp, 0xFE10, 0xFE19) ||
         InRange(cp, 0xFE30, 0xFE6B) || InRange(cp, 0xFF01, 0xFF0F) ||
         InRange(cp, 0xFF1A, 0xFF20) || InRange(cp, 0xFF3B, 0xFF40) ||
         InRange(cp, 0xFF5B, 0xFF65) || cp == 0x30FB;
}

}  // namespace toxicn::utf8
