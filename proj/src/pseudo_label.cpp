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

#include "toxicn/pseudo_label.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "toxicn/error.hpp"
#include "toxicn/normalizer.hpp"
#include "toxicn/utf8.hpp"

namespace toxicn {

std::vector<PseudoLabeledSample> PseudoLabel(std::span<const Document> docs,
                                             const Lexicon& lexicon) {
  std::vector<PseudoLabeledSample> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    PseudoLabeledSample s;
    s.id = d.id;
    s.matches = lexicon.FindMatches(std::string_view(d.text));
    s.toxic = !s.matches.empty();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CandidateTerm> ExtractCandidates(
    std::span<const PseudoLabeledSample> labels, std::span<const Document> docs,
    const Lexicon& lexicon, const CandidateParams& params) {
  if (labels.size() != docs.size()) {
    throw ArgumentError("labels and documents differ in length");
  }
  if (params.max_n < 1) throw ArgumentError("max_n must be at least 1");

  struct Counts {
    std::size_t toxic = 0;
    std::size_t clean = 0;
  };
  std::unordered_map<std::u32string, Counts> counts;
  std::unordered_set<std::u32string> in_doc;

  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto chars = utf8::Decode(docs[d].text);
    const std::size_t n = chars.size();
    // reach[s]: furthest match end among matches starting at or before s
    std::vector<std::size_t> reach(n, 0);
    for (const auto& m : labels[d].matches) {
      if (m.start < n) reach[m.start] = std::max(reach[m.start], m.end);
    }
    for (std::size_t s = 1; s < n; ++s) reach[s] = std::max(reach[s], reach[s - 1]);

    in_doc.clear();
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t len = 1; len <= params.max_n && s + len <= n; ++len) {
        if (!utf8::IsContent(chars[s + len - 1])) break;
        if (reach[s] >= s + len) continue;  // inside a lexicon match
        in_doc.insert(chars.substr(s, len));
      }
    }
    for (const auto& gram : in_doc) {
      auto& c = counts[gram];
      (labels[d].toxic ? c.toxic : c.clean) += 1;
    }
  }

  std::vector<std::pair<std::u32string, CandidateTerm>> ranked;
  for (const auto& [gram, c] : counts) {
    if (c.toxic < params.min_freq) continue;
    if (lexicon.Find(gram)) continue;
    CandidateTerm t{utf8::Encode(gram), c.toxic, c.clean};
    if (t.score() < params.min_score) continue;
    ranked.emplace_back(gram, std::move(t));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    const double sa = a.second.score();
    const double sb = b.second.score();
    if (sa != sb) return sa > sb;
    if (a.second.toxic_freq != b.second.toxic_freq) {
      return a.second.toxic_freq > b.second.toxic_freq;
    }
    return a.first < b.first;
  });
  std::vector<CandidateTerm> out;
  out.reserve(ranked.size());
  for (auto& [gram, t] : ranked) out.push_back(std::move(t));
  return out;
}

std::vector<InsultEntry> LoadAcceptList(std::istream& in,
                                        const std::string& source) {
  std::vector<InsultEntry> out;
  std::string row;
  std::size_t line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty() || row[0] == '#') continue;
    if (row.find('\t') == std::string::npos) {
      InsultEntry e;
      e.term = row;
      out.push_back(std::move(e));
    } else {
      out.push_back(ParseLexiconRow(row, source, line));
    }
  }
  return out;
}

std::vector<InsultEntry> LoadAcceptList(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open accept list", path.string());
  return LoadAcceptList(in, path.string());
}

FixpointResult IterateToFixpoint(std::span<const Document> docs,
                                 const Lexicon& seed,
                                 const std::vector<InsultEntry>& accept,
                                 const CandidateParams& params) {
  // normalized accepted term -> entry
  std::unordered_map<std::string, InsultEntry> pending;
  for (auto e : accept) {
    e.term = NormalizeText(std::string_view(e.term));
    if (e.term.empty() || seed.Contains(e.term)) continue;
    pending.emplace(e.term, e);
  }

  FixpointResult r;
  r.lexicon = seed;
  while (true) {
    r.labels = PseudoLabel(docs, r.lexicon);
    ++r.iterations;
    r.toxic_counts.push_back(static_cast<std::size_t>(std::count_if(
        r.labels.begin(), r.labels.end(),
        [](const PseudoLabeledSample& s) { return s.toxic; })));
    r.candidates = ExtractCandidates(r.labels, docs, r.lexicon, params);

    std::vector<InsultEntry> fresh;
    std::vector<std::string> names;
    for (const auto& c : r.candidates) {
      auto it = pending.find(c.term);
      if (it == pending.end()) continue;
      fresh.push_back(it->second);
      names.push_back(c.term);
      pending.erase(it);
    }
    r.added.push_back(names);
    if (fresh.empty()) return r;
    r.lexicon = r.lexicon.With(fresh);
  }
}

}  // namespace toxicn
