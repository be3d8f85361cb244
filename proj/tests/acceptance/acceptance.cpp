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

// Acceptance suite: one line per criterion with its verdict and timing.
// Exit status is non-zero when any criterion fails; skipped criteria do not
// count as failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "synthetic.hpp"
#include "toxicn/corpus.hpp"
#include "toxicn/lexicon.hpp"
#include "toxicn/metrics.hpp"
#include "toxicn/pseudo_label.hpp"
#include "toxicn/random.hpp"
#include "toxicn/tke.hpp"
#include "toxicn/utf8.hpp"
#include "toxicn/variant.hpp"

namespace {

using namespace toxicn;
using Clock = std::chrono::steady_clock;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status verdict = Status::kFail;
  std::string detail;
};

Outcome Pass(std::string d) { return {Status::kPass, std::move(d)}; }
Outcome Fail(std::string d) { return {Status::kFail, std::move(d)}; }
Outcome Check(bool ok, std::string d) { return {ok ? Status::kPass : Status::kFail, std::move(d)}; }

std::string Fmt(const char* fmt, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

const std::string kResources = TOXICN_RESOURCE_DIR;

Lexicon SeedLexicon() { return Lexicon::Load(kResources + "/lexicon_seed.tsv"); }

std::vector<std::string> Texts(const std::vector<ToxiSample>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

bool SameBits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool SameBits(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.flat().data(), b.flat().data(), a.size() * sizeof(double)) == 0;
}

struct HeldOut {
  double accuracy = 0.0;
  Prediction prediction;
  TrainResult train;
};

HeldOut TrainAndTest(const std::vector<ToxiSample>& train,
                     const std::vector<ToxiSample>& test, const Lexicon& lex,
                     const TkeConfig& cfg) {
  const Vocab vocab = Vocab::Build(Texts(train));
  const auto train_enc = EncodeTask(train, cfg.task, vocab, lex, cfg.pad_len);
  const auto test_enc = EncodeTask(test, cfg.task, vocab, lex, cfg.pad_len);
  HeldOut h;
  h.train = Train(train_enc, vocab.size(), cfg);
  h.prediction = Predict(test_enc, h.train.params, cfg);
  h.accuracy = 100.0 * Accuracy(test_enc, h.prediction.labels);
  return h;
}

// 1. lambda = 0 with knowledge enhancement equals the ablated model bit for bit.
Outcome LambdaZeroEquivalence() {
  const Lexicon lex = SeedLexicon();
  const auto corpus = testing::HierarchyCorpus(500, 7, lex);
  std::size_t runs = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto [train, test] = SplitDataset(corpus.samples, SplitSpec{0.8, seed, false});
    for (Task task : kAllTasks) {
      std::vector<ToxiSample> tr, te;
      for (const auto& s : train) if (Applicable(s, task)) tr.push_back(s);
      for (const auto& s : test) if (Applicable(s, task)) te.push_back(s);
      TkeConfig cfg;
      cfg.task = task;
      cfg.seed = seed;
      cfg.lambda = 0.0;
      const HeldOut full = TrainAndTest(tr, te, lex, cfg);
      cfg.knowledge_enhancement = false;
      const HeldOut ablated = TrainAndTest(tr, te, lex, cfg);
      const auto& p = full.train.params;
      const auto& q = ablated.train.params;
      bool same = SameBits(p.word, q.word) && SameBits(p.enc_w, q.enc_w) &&
                  SameBits(p.enc_b, q.enc_b) && SameBits(p.head_w, q.head_w) &&
                  SameBits(p.head_b, q.head_b) &&
                  full.prediction.labels == ablated.prediction.labels &&
                  full.train.history.size() == ablated.train.history.size();
      for (std::size_t i = 0; same && i < full.prediction.probabilities.size(); ++i) {
        same = SameBits(full.prediction.probabilities[i], ablated.prediction.probabilities[i]);
      }
      if (!same) {
        return Fail("seed " + std::to_string(seed) + " task " +
                    std::string(ToString(task)) + " differs");
      }
      ++runs;
    }
  }
  return Pass(std::to_string(runs) + " seed/task runs bitwise identical");
}

// 2. Automaton matches equal a naive scan.
Outcome MatcherOracle() {
  // 20 symbols: a few letters and ideographs, weighted toward repeats by
  // the short patterns.
  const std::u32string alphabet = U"abcxy老黑蛆蠢驴女拳南蛮满同性恋基佬";
  std::uint64_t state = 2024;
  std::size_t texts = 0, matches = 0;
  for (int lexicon_round = 0; lexicon_round < 20; ++lexicon_round) {
    std::set<std::u32string> unique;
    while (unique.size() < 50) unique.insert(testing::RandomString(state, alphabet, 1, 6));
    std::vector<std::u32string> patterns(unique.begin(), unique.end());
    std::vector<InsultEntry> entries;
    for (const auto& p : patterns) entries.push_back({utf8::Encode(p)});
    const Lexicon lex(entries);
    for (int t = 0; t < 50; ++t) {
      const std::u32string text = testing::RandomString(state, alphabet, 0, 200);
      std::set<std::tuple<std::size_t, std::size_t, std::string>> naive, fast;
      for (std::size_t i = 0; i < text.size(); ++i) {
        for (const auto& p : patterns) {
          if (text.compare(i, p.size(), p) == 0 && i + p.size() <= text.size()) {
            naive.emplace(i, i + p.size(), utf8::Encode(p));
          }
        }
      }
      for (const auto& m : lex.FindMatches(std::u32string_view(text))) {
        fast.emplace(m.start, m.end, lex.entry(m.entry).term);
      }
      if (naive != fast) return Fail("mismatch on text " + utf8::Encode(text));
      matches += naive.size();
      ++texts;
    }
  }
  return Pass(std::to_string(texts) + " texts, " + std::to_string(matches) + " matches agree");
}

// 3. Analytic gradients agree with central differences.
Outcome GradientCorrectness() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const GradCheckCase c = RandomGradCheckCase(seed);
    worst = std::max(worst, GradCheck(c.params, c.batch, c.cfg, c.class_weights).max_rel_error);
  }
  const GradCheckCase c = RandomGradCheckCase(1);
  GradCheckOptions corrupt;
  corrupt.corrupt = true;
  const double bad = GradCheck(c.params, c.batch, c.cfg, c.class_weights, corrupt).max_rel_error;
  return Check(worst < 1e-4 && bad > 1e-1,
               Fmt("max rel error %.2e over 10 configs, corrupted %.2e", worst, bad));
}

// Fleiss' kappa from explicit rater assignments: agreement counted over
// ordered rater pairs, chance from pooled label frequencies.
double KappaFromAssignments(const std::vector<std::vector<int>>& counts) {
  std::vector<std::vector<int>> labels;
  std::size_t k = counts.front().size();
  for (const auto& row : counts) {
    std::vector<int> item;
    for (std::size_t j = 0; j < row.size(); ++j) item.insert(item.end(), row[j], static_cast<int>(j));
    labels.push_back(item);
  }
  double agree_sum = 0.0;
  std::vector<double> freq(k, 0.0);
  double total = 0.0;
  for (const auto& item : labels) {
    std::size_t agree = 0, pairs = 0;
    for (std::size_t a = 0; a < item.size(); ++a) {
      freq[item[a]] += 1.0;
      total += 1.0;
      for (std::size_t b = 0; b < item.size(); ++b) {
        if (a == b) continue;
        ++pairs;
        agree += item[a] == item[b];
      }
    }
    agree_sum += static_cast<double>(agree) / static_cast<double>(pairs);
  }
  const double observed = agree_sum / static_cast<double>(labels.size());
  double chance = 0.0;
  for (double f : freq) chance += (f / total) * (f / total);
  return (observed - chance) / (1.0 - chance);
}

// 4. Fleiss' kappa against an independent computation.
Outcome KappaOracle() {
  const double unanimous = FleissKappa(RatingMatrix({{3, 0}, {0, 3}, {3, 0}}));
  const double opposed = FleissKappa(RatingMatrix({{1, 1}, {1, 1}}));
  Rng rng(99);
  double worst = 0.0;
  int compared = 0;
  while (compared < 200) {
    const std::size_t items = 2 + rng.Below(20);
    const std::size_t cats = 2 + rng.Below(5);
    const int raters = 2 + static_cast<int>(rng.Below(8));
    std::vector<std::vector<int>> counts(items, std::vector<int>(cats, 0));
    for (auto& row : counts) {
      for (int r = 0; r < raters; ++r) ++row[rng.Below(cats)];
    }
    // Skip draws where every rating falls in one category; chance
    // agreement is then 1 and the direct formula is undefined.
    std::size_t used = 0;
    for (std::size_t j = 0; j < cats; ++j) {
      bool any = false;
      for (const auto& row : counts) any = any || row[j] > 0;
      used += any;
    }
    if (used < 2) continue;
    const double got = FleissKappa(RatingMatrix(counts));
    worst = std::max(worst, std::abs(got - KappaFromAssignments(counts)));
    ++compared;
  }
  return Check(unanimous == 1.0 && opposed == -1.0 && worst <= 1e-12,
               Fmt("unanimous %.17g, (A,B)/(B,A) %.17g, max oracle diff %.2e", unanimous,
                   opposed, worst));
}

// 5. Synthetic end-to-end training and a shuffled-label control.
Outcome SyntheticEndToEnd() {
  const Lexicon lex = SeedLexicon();
  const auto corpus = testing::InjectedTermCorpus(2000, 11, lex);
  auto [train, test] = SplitDataset(corpus.samples, SplitSpec{0.8, 1, false});
  TkeConfig cfg;
  cfg.lambda = 0.5;
  cfg.epochs = 20;
  const HeldOut real = TrainAndTest(train, test, lex, cfg);

  Rng rng(StreamSeed(5, "acceptance.shuffle"));
  std::vector<bool> labels;
  for (const auto& s : train) labels.push_back(s.toxic);
  rng.Shuffle(labels);
  for (std::size_t i = 0; i < train.size(); ++i) train[i].toxic = labels[i];
  const HeldOut shuffled = TrainAndTest(train, test, lex, cfg);
  return Check(real.accuracy >= 95.0 && std::abs(shuffled.accuracy - 50.0) <= 5.0,
               Fmt("accuracy %.1f%% (>= 95), shuffled labels %.1f%% (50 +- 5), %.0f epochs",
                   real.accuracy, shuffled.accuracy, static_cast<double>(real.train.history.size())));
}

// 6. Knowledge enhancement helps when insults are rare.
Outcome TkeAdvantage() {
  double with = 0.0, without = 0.0;
  std::size_t max_occurrence = 0;
  const int seeds = 5;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto corpus = testing::RareTermCorpus(1000, static_cast<std::uint64_t>(seed));
    const auto [train, test] =
        SplitDataset(corpus.samples, SplitSpec{0.8, static_cast<std::uint64_t>(seed), false});
    for (const auto& e : corpus.lexicon.entries()) {
      std::size_t n = 0;
      for (const auto& s : train) n += s.text.find(e.term) != std::string::npos;
      max_occurrence = std::max(max_occurrence, n);
    }
    TkeConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.lambda = 0.5;
    with += TrainAndTest(train, test, corpus.lexicon, cfg).accuracy;
    cfg.lambda = 0.0;
    without += TrainAndTest(train, test, corpus.lexicon, cfg).accuracy;
  }
  with /= seeds;
  without /= seeds;
  return Check(max_occurrence <= 2 && with >= without + 5.0,
               Fmt("mean accuracy lambda=0.5 %.1f%%, lambda=0 %.1f%%, max insult count %.0f",
                   with, without, static_cast<double>(max_occurrence)));
}

// 7. Statistics of the public corpus, when supplied.
Outcome PublicCorpusStats() {
  const char* path = std::getenv("TOXICN_CORPUS");
  if (path == nullptr || *path == '\0') {
    return {Status::kSkip, "set TOXICN_CORPUS to the public corpus in JSON Lines form"};
  }
  const auto corpus = ReadCorpus(path, ParseMode::kLenient);
  std::size_t invalid = 0;
  for (const auto& s : corpus) invalid += !ValidateHierarchy(s).ok();
  const StatsReport r = CorpusStats(corpus);
  const auto& t = r.total;
  const bool ok = invalid == 0 && t.total == 12011 && t.toxic == 6461 &&
                  t.offensive == 816 && t.hate == 5645 &&
                  t.hate_by_expression[0] == 2737 && t.hate_by_expression[1] == 1995 &&
                  t.hate_by_expression[2] == 913 && r.group_total(Group::kSexism) == 2302 &&
                  r.group_total(Group::kRacism) == 1874 &&
                  r.group_total(Group::kRegionalBias) == 1289 &&
                  r.group_total(Group::kAntiLgbtq) == 1075;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "total %zu toxic %zu offensive %zu hate %zu expr %zu/%zu/%zu groups "
                "%zu/%zu/%zu/%zu invalid %zu",
                t.total, t.toxic, t.offensive, t.hate, t.hate_by_expression[0],
                t.hate_by_expression[1], t.hate_by_expression[2],
                r.group_total(Group::kSexism), r.group_total(Group::kRacism),
                r.group_total(Group::kRegionalBias), r.group_total(Group::kAntiLgbtq), invalid);
  return Check(ok, buf);
}

// 8. Variant fixtures from the insult lexicon.
Outcome VariantFixtures() {
  const PinyinTable pinyin = PinyinTable::Load(kResources + "/pinyin.tsv");
  const GlyphTable glyph = GlyphTable::Load(kResources + "/glyph.tsv");
  const std::string abbr = GenerateAbbreviation("同性恋", pinyin).variant;
  bool homophone = false;
  for (const auto& v : GenerateHomophones("南蛮", pinyin, pinyin.Characters())) {
    homophone = homophone || v.variant == "南满";
  }
  const Deformation d = ExpandDeformation("默", glyph);
  const bool mixed = DetectCodeMixing("ni哥").mixed;
  const bool ok = abbr == "txl" && homophone && d.covered &&
                  d.characters == std::vector<std::string>{"黑", "犬"} && mixed;
  return Check(ok, "abbreviation '" + abbr + "', homophone " + (homophone ? "found" : "missing") +
                       ", deformation " + (d.covered ? "covered" : "missing") + ", code mixing " +
                       (mixed ? "detected" : "missed"));
}

// 9. Two-stage pseudo-labeling fixture.
Outcome PseudoLabelFixpoint() {
  const std::vector<Document> docs = {
      {1, "蠢驴老黑"}, {2, "蠢驴老黑来了"}, {3, "老黑黑蛆"},
      {4, "老黑是黑蛆"}, {5, "黑蛆滚开"},   {6, "今天天气很好"},
  };
  const Lexicon seed({{"蠢驴"}});
  const std::vector<InsultEntry> accept = {{"老黑"}, {"黑蛆"}};
  CandidateParams params;
  params.min_freq = 2;
  params.min_score = 1.0;
  const FixpointResult r = IterateToFixpoint(docs, seed, accept, params);
  const bool monotone = std::is_sorted(r.toxic_counts.begin(), r.toxic_counts.end());
  const bool ok = r.iterations == 3 && monotone &&
                  r.toxic_counts == std::vector<std::size_t>{2, 4, 5};
  std::string counts;
  for (auto c : r.toxic_counts) counts += (counts.empty() ? "" : ",") + std::to_string(c);
  return Check(ok, std::to_string(r.iterations) + " passes (expected 3), toxic counts " + counts +
                       " (expected 2,4,5)");
}

struct Criterion {
  int number;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "lambda-zero equivalence", 30, LambdaZeroEquivalence},
      {2, "matcher oracle", 2, MatcherOracle},
      {3, "gradient correctness", 10, GradientCorrectness},
      {4, "kappa oracle", 1, KappaOracle},
      {5, "synthetic end-to-end", 60, SyntheticEndToEnd},
      {6, "knowledge enhancement advantage", 120, TkeAdvantage},
      {7, "public corpus statistics", 5, PublicCorpusStats},
      {8, "variant fixtures", 1, VariantFixtures},
      {9, "pseudo-labeling fixpoint", 1, PseudoLabelFixpoint},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = Fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (o.verdict == Status::kPass && secs >= c.limit_seconds) {
      o.verdict = Status::kFail;
      o.detail += "; over time limit";
    }
    const char* tag = o.verdict == Status::kPass ? "PASS" : o.verdict == Status::kSkip ? "SKIP" : "FAIL";
    std::printf("[%s] criterion %d %s: %s (%.2f s, limit %.0f s)\n", tag, c.number, c.name,
                o.detail.c_str(), secs, c.limit_seconds);
    std::fflush(stdout);
    failed += o.verdict == Status::kFail;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
