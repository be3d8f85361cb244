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

#include "toxicn/metrics.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "toxicn/error.hpp"

namespace toxicn {

namespace {

ClassScore Score(std::size_t tp, std::size_t predicted, std::size_t support) {
  ClassScore c;
  c.support = support;
  c.predicted = predicted;
  c.precision = predicted ? static_cast<double>(tp) / predicted : 0.0;
  c.recall = support ? static_cast<double>(tp) / support : 0.0;
  const double s = c.precision + c.recall;
  c.f1 = s > 0.0 ? 2.0 * c.precision * c.recall / s : 0.0;
  return c;
}

void Aggregate(PrfReport& r) {
  std::size_t total = 0;
  for (const auto& c : r.per_class) {
    total += c.support;
    if (c.support > 0 && c.predicted == 0) ++r.zero_division;
  }
  if (total == 0) return;
  for (const auto& c : r.per_class) {
    const double w = static_cast<double>(c.support) / static_cast<double>(total);
    r.precision += w * c.precision;
    r.recall += w * c.recall;
    r.f1 += w * c.f1;
  }
  r.precision *= 100.0;
  r.recall *= 100.0;
  r.f1 *= 100.0;
}

}  // namespace

PrfReport WeightedPrf(std::span<const int> predicted, std::span<const int> gold,
                      std::size_t n_classes) {
  if (predicted.empty()) throw ArgumentError("empty prediction list");
  if (predicted.size() != gold.size()) {
    throw ArgumentError("predictions and gold labels differ in length");
  }
  std::vector<std::size_t> tp(n_classes, 0), pred(n_classes, 0), sup(n_classes, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int p = predicted[i];
    const int g = gold[i];
    if (p < 0 || g < 0 || static_cast<std::size_t>(p) >= n_classes ||
        static_cast<std::size_t>(g) >= n_classes) {
      throw ArgumentError("label out of range");
    }
    ++pred[p];
    ++sup[g];
    if (p == g) ++tp[g];
  }
  PrfReport r;
  for (std::size_t c = 0; c < n_classes; ++c) {
    r.per_class.push_back(Score(tp[c], pred[c], sup[c]));
  }
  Aggregate(r);
  return r;
}

PrfReport WeightedPrfMultiLabel(std::span<const std::uint32_t> predicted,
                                std::span<const std::uint32_t> gold,
                                std::size_t n_labels) {
  if (predicted.empty()) throw ArgumentError("empty prediction list");
  if (predicted.size() != gold.size()) {
    throw ArgumentError("predictions and gold labels differ in length");
  }
  if (n_labels == 0 || n_labels > 32) throw ArgumentError("bad label count");
  const std::uint32_t valid =
      n_labels == 32 ? ~0u : ((1u << n_labels) - 1u);
  PrfReport r;
  for (std::size_t j = 0; j < n_labels; ++j) {
    std::size_t tp = 0, pred = 0, sup = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if ((predicted[i] & ~valid) || (gold[i] & ~valid)) {
        throw ArgumentError("label out of range");
      }
      const bool p = (predicted[i] >> j) & 1u;
      const bool g = (gold[i] >> j) & 1u;
      pred += p;
      sup += g;
      tp += p && g;
    }
    r.per_class.push_back(Score(tp, pred, sup));
  }
  Aggregate(r);
  return r;
}

std::string_view ToString(Stratum s) {
  switch (s) {
    case Stratum::kNonToxic:
      return "non_toxic";
    case Stratum::kExplicit:
      return "explicit";
    case Stratum::kImplicit:
      return "implicit";
    case Stratum::kReporting:
      return "reporting";
  }
  return "non_toxic";
}

Stratum StratumOf(const ToxiSample& s) {
  if (!s.toxic) return Stratum::kNonToxic;
  if (!s.hate || !s.expression) return Stratum::kExplicit;
  switch (*s.expression) {
    case Expression::kExplicit:
      return Stratum::kExplicit;
    case Expression::kImplicit:
      return Stratum::kImplicit;
    case Expression::kReporting:
      return Stratum::kReporting;
  }
  return Stratum::kExplicit;
}

ExpressionBreakdown ExpressionAccuracyBreakdown(std::span<const bool> toxic_pred,
                                                std::span<const ToxiSample> gold) {
  if (toxic_pred.size() != gold.size()) {
    throw ArgumentError("predictions and gold samples differ in length");
  }
  ExpressionBreakdown b{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto& s = b[static_cast<std::size_t>(StratumOf(gold[i]))];
    ++s.total;
    if (toxic_pred[i] == gold[i].toxic) ++s.correct;
  }
  return b;
}

RatingMatrix::RatingMatrix(std::vector<std::vector<int>> counts)
    : counts_(std::move(counts)) {
  if (counts_.empty()) throw ArgumentError("rating matrix has no items");
  const std::size_t k = counts_.front().size();
  if (k == 0) throw ArgumentError("rating matrix has no categories");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const auto& row = counts_[i];
    if (row.size() != k) {
      throw ArgumentError("item " + std::to_string(i) + " has " +
                          std::to_string(row.size()) + " categories, expected " +
                          std::to_string(k));
    }
    int sum = 0;
    for (int c : row) {
      if (c < 0) throw ArgumentError("negative rating count");
      sum += c;
    }
    if (i == 0) raters_ = sum;
    if (sum != raters_) {
      throw ArgumentError("item " + std::to_string(i) + " has " +
                          std::to_string(sum) + " ratings, expected " +
                          std::to_string(raters_));
    }
  }
  if (raters_ < 2) throw ArgumentError("need at least 2 raters per item");
}

RatingMatrix RatingMatrix::Load(std::istream& in, const std::string& source) {
  std::vector<std::vector<int>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cols(line);
    std::string item, cell;
    std::getline(cols, item, '\t');
    std::vector<int> row;
    while (std::getline(cols, cell, '\t')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stoi(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError("bad count '" + cell + "'", source, line_no);
      }
    }
    rows.push_back(std::move(row));
  }
  try {
    return RatingMatrix(std::move(rows));
  } catch (const ArgumentError& e) {
    throw DataError(e.what(), source);
  }
}

RatingMatrix RatingMatrix::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ratings file", path.string());
  return Load(in, path.string());
}

double FleissKappa(const RatingMatrix& m) {
  const auto n_items = static_cast<double>(m.items());
  const auto r = static_cast<double>(m.raters());
  const std::size_t k = m.categories();

  std::vector<double> column(k, 0.0);
  double agreement = 0.0;
  bool unanimous = true;
  for (const auto& row : m.counts()) {
    double sq = 0.0;
    int nonzero = 0;
    for (std::size_t j = 0; j < k; ++j) {
      sq += static_cast<double>(row[j]) * row[j];
      column[j] += row[j];
      nonzero += row[j] > 0;
    }
    unanimous = unanimous && nonzero == 1;
    agreement += (sq - r) / (r * (r - 1.0));
  }
  if (unanimous) return 1.0;
  agreement /= n_items;

  double chance = 0.0;
  for (double c : column) {
    const double p = c / (n_items * r);
    chance += p * p;
  }
  if (chance >= 1.0) {
    throw ArgumentError("kappa undefined: expected agreement is 1");
  }
  return (agreement - chance) / (1.0 - chance);
}

nlohmann::json ToJson(const PrfReport& r, std::span<const std::string> names) {
  nlohmann::json j;
  j["precision"] = RoundTo1(r.precision);
  j["recall"] = RoundTo1(r.recall);
  j["f1"] = RoundTo1(r.f1);
  j["zero_division"] = r.zero_division;
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& s = r.per_class[c];
    classes.push_back({{"class", c < names.size() ? names[c] : std::to_string(c)},
                       {"precision", RoundTo1(100.0 * s.precision)},
                       {"recall", RoundTo1(100.0 * s.recall)},
                       {"f1", RoundTo1(100.0 * s.f1)},
                       {"support", s.support}});
  }
  j["classes"] = std::move(classes);
  return j;
}

nlohmann::json ToJson(const ExpressionBreakdown& b) {
  nlohmann::json j;
  for (int s = 0; s < kNumStrata; ++s) {
    const auto acc = b[s].accuracy();
    j[std::string(ToString(static_cast<Stratum>(s)))] = {
        {"accuracy", acc ? nlohmann::json(RoundTo1(*acc)) : nlohmann::json(nullptr)},
        {"correct", b[s].correct},
        {"total", b[s].total}};
  }
  return j;
}

std::string FormatPrfTable(const PrfReport& r, std::span<const std::string> names) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << std::left << std::setw(16) << "class" << std::right << std::setw(10)
     << "precision" << std::setw(10) << "recall" << std::setw(10) << "f1"
     << std::setw(10) << "support" << '\n';
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& s = r.per_class[c];
    os << std::left << std::setw(16)
       << (c < names.size() ? names[c] : std::to_string(c)) << std::right
       << std::setw(10) << RoundTo1(100.0 * s.precision) << std::setw(10)
       << RoundTo1(100.0 * s.recall) << std::setw(10) << RoundTo1(100.0 * s.f1)
       << std::setw(10) << s.support << '\n';
  }
  os << std::left << std::setw(16) << "weighted avg" << std::right << std::setw(10)
     << RoundTo1(r.precision) << std::setw(10) << RoundTo1(r.recall)
     << std::setw(10) << RoundTo1(r.f1) << '\n';
  return os.str();
}

std::string FormatBreakdown(const ExpressionBreakdown& b) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  for (int s = 0; s < kNumStrata; ++s) {
    os << std::left << std::setw(12) << ToString(static_cast<Stratum>(s))
       << std::right;
    if (const auto acc = b[s].accuracy()) {
      os << std::setw(8) << RoundTo1(*acc);
    } else {
      os << std::setw(8) << "n/a";
    }
    os << "  (" << b[s].correct << "/" << b[s].total << ")\n";
  }
  return os.str();
}

}  // namespace toxicn
