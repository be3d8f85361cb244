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

#ifndef TOXICN_PSEUDO_LABEL_HPP_
#define TOXICN_PSEUDO_LABEL_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "toxicn/lexicon.hpp"

namespace toxicn {

// A normalized comment awaiting pseudo-labels.
struct Document {
  std::uint64_t id = 0;
  std::string text;
};

struct PseudoLabeledSample {
  std::uint64_t id = 0;
  bool toxic = false;  // true iff matches is non-empty
  std::vector<LexiconMatch> matches;

  friend bool operator==(const PseudoLabeledSample&,
                         const PseudoLabeledSample&) = default;
};

// Lexicon-match labels: a document is pseudo-toxic iff some term occurs in it.
std::vector<PseudoLabeledSample> PseudoLabel(std::span<const Document> docs,
                                             const Lexicon& lexicon);

struct CandidateTerm {
  std::string term;
  std::size_t toxic_freq = 0;  // pseudo-toxic documents containing the term
  std::size_t clean_freq = 0;  // pseudo-non-toxic documents containing it
  double score() const {
    return static_cast<double>(toxic_freq + 1) /
           static_cast<double>(clean_freq + 1);
  }
};

struct CandidateParams {
  std::size_t min_freq = 3;
  double min_score = 3.0;
  std::size_t max_n = 4;
};

// Character n-grams (1 <= n <= max_n, content characters only) that are not
// lexicon terms, ranked by score then toxic_freq then code points. Frequencies
// count documents, and an occurrence lying entirely inside a lexicon match
// does not count. `labels` must be PseudoLabel(docs, lexicon).
std::vector<CandidateTerm> ExtractCandidates(
    std::span<const PseudoLabeledSample> labels, std::span<const Document> docs,
    const Lexicon& lexicon, const CandidateParams& params = {});

// Reviewed terms. Rows are either a bare term (category general) or a full
// lexicon row. '#' comments and blank lines are skipped.
std::vector<InsultEntry> LoadAcceptList(const std::filesystem::path& path);
std::vector<InsultEntry> LoadAcceptList(std::istream& in,
                                        const std::string& source);

struct FixpointResult {
  Lexicon lexicon;
  std::vector<PseudoLabeledSample> labels;
  // Number of labeling passes, including the final one that added nothing.
  std::size_t iterations = 0;
  // Pseudo-toxic count after each pass.
  std::vector<std::size_t> toxic_counts;
  // Terms accepted at the end of each pass (the last entry is empty).
  std::vector<std::vector<std::string>> added;
  // Candidates surfaced by the final pass.
  std::vector<CandidateTerm> candidates;
};

// Label, surface candidates, add the accepted ones that surfaced, relabel;
// stop when a pass adds nothing. Terminates because the lexicon only grows
// and is bounded by the accept list.
FixpointResult IterateToFixpoint(std::span<const Document> docs,
                                 const Lexicon& seed,
                                 const std::vector<InsultEntry>& accept,
                                 const CandidateParams& params = {});

}  // namespace toxicn

#endif  // TOXICN_PSEUDO_LABEL_HPP_
