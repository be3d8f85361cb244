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

#ifndef TOXICN_NORMALIZER_HPP_
#define TOXICN_NORMALIZER_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace toxicn {

struct NormalizeConfig {
  // Minimum number of Han ideographs, letters and digits for a comment to
  // carry meaning.
  int min_content_chars = 4;
  bool strip_mentions = true;
  bool strip_urls = true;
  bool collapse_whitespace = true;
};

// Cleans one raw web comment:
//   * full-width letters/digits, the full-width '@' and the ideographic space
//     are folded to ASCII;
//   * image placeholders such as "[图片]" are removed;
//   * URLs ("scheme://..." and "www....") and @-mentions are removed;
//   * whitespace runs collapse to a single space and the ends are trimmed.
// Emoji are never touched. The passes repeat until the text stops changing,
// so the result is a fixed point: NormalizeText(NormalizeText(s)) ==
// NormalizeText(s).
std::string NormalizeText(std::string_view raw, const NormalizeConfig& cfg = {});
std::u32string NormalizeText(std::u32string_view raw,
                             const NormalizeConfig& cfg = {});

// Number of Han ideographs, letters and digits.
std::size_t ContentCharCount(std::string_view text);

// True iff the text has at least cfg.min_content_chars content characters.
bool IsSubstantive(std::string_view text, const NormalizeConfig& cfg = {});

// Ids of the first occurrence of every distinct text, in input order.
// Comparison is exact (case-sensitive) on the normalized strings.
std::vector<std::uint64_t> Deduplicate(
    const std::vector<std::pair<std::uint64_t, std::string>>& corpus);

}  // namespace toxicn

#endif  // TOXICN_NORMALIZER_HPP_
