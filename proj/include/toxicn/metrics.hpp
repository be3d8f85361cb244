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

#ifndef TOXICN_METRICS_HPP_
#define TOXICN_METRICS_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxicn/corpus.hpp"

namespace toxicn {

struct ClassScore {
  double precision = 0.0;  // fractions in [0, 1]
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;    // gold positives
  std::size_t predicted = 0;  // predicted positives
};

// Support-weighted precision/recall/F1 in percent.
struct PrfReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<ClassScore> per_class;
  // Classes with gold support but no predicted positives; their precision
  // is taken as 0.
  std::size_t zero_division = 0;
};

// Single-label classes in [0, n_classes). Throws ArgumentError on empty or
// mismatched input and out-of-range labels.
PrfReport WeightedPrf(std::span<const int> predicted, std::span<const int> gold,
                      std::size_t n_classes);

// Multi-label bit masks over n_labels labels; each label is a binary problem
// weighted by its positive support.
PrfReport WeightedPrfMultiLabel(std::span<const std::uint32_t> predicted,
                                std::span<const std::uint32_t> gold,
                                std::size_t n_labels);

enum class Stratum : std::uint8_t { kNonToxic, kExplicit, kImplicit, kReporting };
inline constexpr int kNumStrata = 4;
std::string_view ToString(Stratum s);

// General offensive samples fall in the explicit stratum (their expression
// is explicit by definition).
Stratum StratumOf(const ToxiSample& s);

struct StratumAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  // Percent; nullopt when the stratum is empty.
  std::optional<double> accuracy() const {
    if (total == 0) return std::nullopt;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  }
};

using ExpressionBreakdown = std::array<StratumAccuracy, kNumStrata>;

// Toxic-identification accuracy per gold stratum.
ExpressionBreakdown ExpressionAccuracyBreakdown(std::span<const bool> toxic_pred,
                                                std::span<const ToxiSample> gold);

// N items x k categories; every row sums to the same rater count r >= 2.
class RatingMatrix {
 public:
  // Throws ArgumentError when the invariants do not hold.
  explicit RatingMatrix(std::vector<std::vector<int>> counts);

  static RatingMatrix Load(const std::filesystem::path& path);
  // Rows "item<TAB>count<TAB>count...", '#' comments.
  static RatingMatrix Load(std::istream& in, const std::string& source);

  std::size_t items() const { return counts_.size(); }
  std::size_t categories() const { return counts_.front().size(); }
  int raters() const { return raters_; }
  const std::vector<std::vector<int>>& counts() const { return counts_; }

 private:
  std::vector<std::vector<int>> counts_;
  int raters_ = 0;
};

// Fleiss' kappa. Exactly 1.0 when every item is unanimous.
double FleissKappa(const RatingMatrix& m);

inline double RoundTo1(double x) { return std::round(x * 10.0) / 10.0; }

nlohmann::json ToJson(const PrfReport& r, std::span<const std::string> names);
nlohmann::json ToJson(const ExpressionBreakdown& b);
std::string FormatPrfTable(const PrfReport& r, std::span<const std::string> names);
std::string FormatBreakdown(const ExpressionBreakdown& b);

}  // namespace toxicn

#endif  // TOXICN_METRICS_HPP_
