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

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "report.hpp"
#include "toxicn/corpus.hpp"
#include "toxicn/error.hpp"
#include "toxicn/lexicon.hpp"
#include "toxicn/metrics.hpp"
#include "toxicn/normalizer.hpp"
#include "toxicn/pseudo_label.hpp"
#include "toxicn/tke.hpp"
#include "toxicn/utf8.hpp"
#include "toxicn/variant.hpp"

namespace toxicn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct JsonlRecord {
  std::size_t line = 0;
  json value;
};

struct JsonlFile {
  std::optional<json> header;
  std::vector<JsonlRecord> records;
};

// Reads JSON Lines. A first line carrying the schema key is kept apart as
// the header.
JsonlFile ReadJsonl(const Path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open", path.string());
  JsonlFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(std::string("invalid JSON: ") + e.what(), path.string(),
                      line_no);
    }
    if (!value.is_object()) {
      throw DataError("expected a JSON object", path.string(), line_no);
    }
    if (file.records.empty() && !file.header &&
        value.contains(std::string(kSchemaKey))) {
      file.header = std::move(value);
      continue;
    }
    file.records.push_back({line_no, std::move(value)});
  }
  return file;
}

std::uint64_t RecordId(const JsonlRecord& r, const Path& path) {
  const auto it = r.value.find("id");
  if (it == r.value.end() || !it->is_number_unsigned()) {
    throw DataError("missing or non-integer 'id'", path.string(), r.line);
  }
  return it->get<std::uint64_t>();
}

std::string RecordText(const JsonlRecord& r, const Path& path) {
  const auto it = r.value.find("text");
  if (it == r.value.end() || !it->is_string()) {
    throw DataError("missing or non-string 'text'", path.string(), r.line);
  }
  return it->get<std::string>();
}

std::vector<Document> ReadDocuments(const Path& path) {
  const JsonlFile file = ReadJsonl(path);
  std::vector<Document> docs;
  docs.reserve(file.records.size());
  for (const auto& r : file.records) {
    docs.push_back({RecordId(r, path), RecordText(r, path)});
  }
  return docs;
}

std::unordered_set<std::uint64_t> ReadIdList(const Path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open", path.string());
  std::unordered_set<std::uint64_t> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::size_t used = 0;
    try {
      ids.insert(std::stoull(token, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw DataError("expected a numeric id", path.string(), line_no);
    }
  }
  return ids;
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

std::string Jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

json MatchesJson(const Lexicon& lex, const std::vector<LexiconMatch>& matches) {
  json arr = json::array();
  for (const auto& m : matches) {
    const auto& e = lex.entry(m.entry);
    arr.push_back({{"start", m.start},
                   {"end", m.end},
                   {"term", e.term},
                   {"category", std::string(ToString(e.category))}});
  }
  return arr;
}

Lexicon LoadLexiconOrDefault(const Path& path, const RunConfig& cfg) {
  if (!path.empty()) return Lexicon::Load(path);
  return Lexicon::Load(ResourceDir(cfg) / "lexicon_seed.tsv");
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::vector<std::string> Texts(std::span<const ToxiSample> samples) {
  std::vector<std::string> texts;
  texts.reserve(samples.size());
  for (const auto& s : samples) texts.push_back(s.text);
  return texts;
}

std::string HistoryTsv(const std::vector<EpochStats>& history) {
  std::string out = "epoch\ttrain_loss\ttrain_accuracy\tval_loss\tval_accuracy\n";
  for (const auto& h : history) {
    out += std::to_string(h.epoch) + "\t" + FormatDouble(h.train_loss) + "\t" +
           FormatDouble(h.train_accuracy) + "\t" + FormatDouble(h.val_loss) +
           "\t" + FormatDouble(h.val_accuracy) + "\n";
  }
  return out;
}

json HistoryJson(const TrainResult& r) {
  json arr = json::array();
  for (const auto& h : r.history) {
    arr.push_back({{"epoch", h.epoch},
                   {"train_loss", h.train_loss},
                   {"train_accuracy", h.train_accuracy},
                   {"val_loss", h.val_loss},
                   {"val_accuracy", h.val_accuracy}});
  }
  return arr;
}

std::vector<ToxiSample> Applicable(std::span<const ToxiSample> samples,
                                   Task task) {
  std::vector<ToxiSample> out;
  for (const auto& s : samples) {
    if (toxicn::Applicable(s, task)) out.push_back(s);
  }
  return out;
}

void CheckExists(const Path& path, const char* what) {
  std::error_code ec;
  if (path.empty()) throw DataError(std::string("no ") + what + " given");
  if (!fs::exists(path, ec)) throw DataError(std::string(what) + " not found", path.string());
}

void PrepareOutputDir(const Path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("output directory is not writable", dir.string());
  }
}

// Normalizes corpus texts in place; annotated corpora are usually clean
// already, and normalization is idempotent.
void NormalizeCorpus(std::vector<ToxiSample>& corpus) {
  for (auto& s : corpus) s.text = NormalizeText(std::string_view(s.text));
}

std::string Timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void RunNormalize(const NormalizeOptions& o, std::ostream& out) {
  const JsonlFile file = ReadJsonl(o.in);
  std::unordered_set<std::uint64_t> exclude;
  if (o.exclude) exclude = ReadIdList(*o.exclude);

  NormalizeConfig cfg;
  cfg.min_content_chars = o.min_chars;
  std::size_t brief = 0;
  std::size_t excluded = 0;
  std::vector<std::pair<std::uint64_t, std::string>> kept_texts;
  std::vector<json> kept_records;
  for (const auto& r : file.records) {
    const std::uint64_t id = RecordId(r, o.in);
    const std::string text = NormalizeText(RecordText(r, o.in), cfg);
    if (exclude.count(id) != 0) {
      ++excluded;
      continue;
    }
    if (!IsSubstantive(text, cfg)) {
      ++brief;
      continue;
    }
    json record = r.value;
    record["text"] = text;
    kept_texts.emplace_back(id, text);
    kept_records.push_back(std::move(record));
  }
  // Deduplicate by position so repeated ids cannot confuse the merge.
  std::vector<std::pair<std::uint64_t, std::string>> by_index;
  by_index.reserve(kept_texts.size());
  for (std::size_t i = 0; i < kept_texts.size(); ++i) {
    by_index.emplace_back(i, kept_texts[i].second);
  }
  const std::vector<std::uint64_t> unique = Deduplicate(by_index);
  std::vector<json> rows;
  if (file.header) rows.push_back(*file.header);
  for (std::uint64_t i : unique) rows.push_back(kept_records[i]);
  const std::size_t dup = kept_texts.size() - unique.size();
  WriteFile(o.out, Jsonl(rows));
  out << "kept=" << unique.size() << " dropped_brief=" << brief
      << " dropped_dup=" << dup;
  if (excluded != 0) out << " excluded=" << excluded;
  out << "\n";
}

void RunMatch(const MatchOptions& o, std::ostream& out) {
  const Lexicon lex = Lexicon::Load(o.lexicon);
  const std::vector<Document> docs = ReadDocuments(o.in);
  std::vector<json> rows;
  std::size_t with_match = 0;
  for (const auto& d : docs) {
    const auto matches = lex.FindMatches(std::string_view(d.text));
    with_match += !matches.empty();
    rows.push_back({{"id", d.id}, {"matches", MatchesJson(lex, matches)}});
  }
  WriteFile(o.out, Jsonl(rows));
  out << "documents=" << docs.size() << " matched=" << with_match << "\n";
}

void RunDerive(const DeriveOptions& o, std::ostream& out) {
  const bool every_rule = o.rule == "all";
  VariantRule rule = VariantRule::kHomophonic;
  if (!every_rule) {
    const auto parsed = ParseVariantRule(o.rule);
    if (!parsed) throw DataError("unknown rule '" + o.rule + "'");
    rule = *parsed;
  }
  if (o.term.empty()) throw DataError("empty term");
  const PinyinTable pinyin = PinyinTable::Load(o.resources / "pinyin.tsv");
  const GlyphTable glyph = GlyphTable::Load(o.resources / "glyph.tsv");
  const std::string term = NormalizeText(std::string_view(o.term));

  std::vector<VariantCandidate> all;
  auto wants = [&](VariantRule r) { return every_rule || rule == r; };
  if (wants(VariantRule::kHomophonic)) {
    auto v = GenerateHomophones(term, pinyin, pinyin.Characters(), o.limit);
    all.insert(all.end(), v.begin(), v.end());
  }
  if (wants(VariantRule::kAbbreviation)) {
    auto v = GenerateAbbreviation(term, pinyin);
    if (!v.variant.empty()) all.push_back(std::move(v));
  }
  if (wants(VariantRule::kCodeMixing)) {
    auto v = GenerateCodeMixing(term, pinyin);
    all.insert(all.end(), v.begin(), v.end());
  }
  if (wants(VariantRule::kDeformation)) {
    auto v = GenerateDeformations(term, glyph);
    all.insert(all.end(), v.begin(), v.end());
  }
  for (const auto& v : all) {
    out << v.variant << "\t" << ToString(v.rule);
    if (!v.note.empty()) out << "\t" << v.note;
    out << "\n";
  }
  if (all.empty()) out << "# no variants for '" << term << "'\n";
}

void RunPseudolabel(const PseudolabelOptions& o, std::ostream& out) {
  const Lexicon seed = Lexicon::Load(o.lexicon);
  const std::vector<Document> docs = ReadDocuments(o.in);
  std::vector<InsultEntry> accept;
  if (o.accept) accept = LoadAcceptList(*o.accept);
  CandidateParams params;
  params.min_freq = o.min_freq;
  params.min_score = o.min_score;
  params.max_n = o.max_n;
  const FixpointResult r = IterateToFixpoint(docs, seed, accept, params);

  std::vector<json> rows;
  for (const auto& l : r.labels) {
    rows.push_back({{"id", l.id},
                    {"toxic", l.toxic},
                    {"matches", MatchesJson(r.lexicon, l.matches)}});
  }
  WriteFile(o.out, Jsonl(rows));
  if (o.report) {
    std::string tsv = "term\ttoxic_freq\tclean_freq\tscore\n";
    for (const auto& c : r.candidates) {
      tsv += c.term + "\t" + std::to_string(c.toxic_freq) + "\t" +
             std::to_string(c.clean_freq) + "\t" + FormatDouble(c.score()) + "\n";
    }
    WriteFile(*o.report, tsv);
  }
  if (o.lexicon_out) {
    std::ostringstream lex;
    r.lexicon.Save(lex);
    WriteFile(*o.lexicon_out, lex.str());
  }
  out << "iterations=" << r.iterations << " toxic=";
  for (std::size_t i = 0; i < r.toxic_counts.size(); ++i) {
    out << (i ? "," : "") << r.toxic_counts[i];
  }
  out << " documents=" << docs.size() << " lexicon=" << r.lexicon.size()
      << " candidates=" << r.candidates.size() << "\n";
}

std::size_t RunValidate(const Path& in, std::ostream& out, std::ostream& err) {
  const JsonlFile file = ReadJsonl(in);
  if (!file.header) throw DataError("missing schema header", in.string());
  std::size_t invalid = 0;
  for (const auto& r : file.records) {
    ToxiSample s;
    try {
      s = ParseSample(r.value, r.line, ParseMode::kLenient);
    } catch (const ParseError& e) {
      throw DataError(e.what(), in.string(), r.line);
    }
    const Verdict v = ValidateHierarchy(s);
    if (v.ok()) continue;
    ++invalid;
    err << in.string() << ":" << r.line << ": id " << s.id << ": " << v.ToString() << "\n";
  }
  out << "records=" << file.records.size() << " valid=" << file.records.size() - invalid
      << " invalid=" << invalid << "\n";
  return invalid;
}

void RunStats(const StatsOptions& o, std::ostream& out) {
  const std::vector<ToxiSample> corpus = ReadCorpus(o.in, ParseMode::kStrict);
  const StatsReport report = CorpusStats(corpus);
  out << FormatStatsTable(report);
  if (o.json) WriteFile(*o.json, Dump(ToJson(report)));
}

void RunTrain(const TrainOptions& o, std::ostream& out) {
  const RunConfig& cfg = o.config;
  cfg.model.Validate();
  CheckExists(cfg.corpus, "corpus");
  PrepareOutputDir(o.out_dir);
  std::vector<ToxiSample> corpus = ReadCorpus(cfg.corpus, ParseMode::kStrict);
  NormalizeCorpus(corpus);
  const Lexicon lex = LoadLexiconOrDefault(cfg.lexicon, cfg);

  std::vector<ToxiSample> train = corpus;
  std::vector<ToxiSample> test;
  if (!o.no_split) {
    std::tie(train, test) = SplitDataset(
        corpus, SplitSpec{cfg.train_ratio, cfg.model.seed, cfg.stratify});
  }
  const Vocab vocab = Vocab::Build(Texts(train));
  const auto encoded =
      EncodeTask(train, cfg.model.task, vocab, lex, cfg.model.pad_len);
  if (encoded.empty()) {
    throw DataError("no training samples for task " +
                    std::string(ToString(cfg.model.task)));
  }
  const TrainResult r = Train(encoded, vocab.size(), cfg.model);

  SaveCheckpoint(o.out_dir / "model.json", Checkpoint{cfg.model, vocab, lex, r.params});
  WriteFile(o.out_dir / "history.tsv", HistoryTsv(r.history));
  if (!o.no_split) WriteCorpus(o.out_dir / "test.jsonl", test);
  out << "task=" << ToString(cfg.model.task) << " train=" << encoded.size()
      << " vocab=" << vocab.size() << " epochs=" << r.history.size()
      << " best_epoch=" << r.best_epoch
      << " best_val_loss=" << FormatDouble(r.best_val_loss) << "\n";
}

void RunEval(const EvalOptions& o, std::ostream& out) {
  const Checkpoint ckpt = LoadCheckpoint(o.model);
  std::vector<ToxiSample> corpus = ReadCorpus(o.test, ParseMode::kStrict);
  NormalizeCorpus(corpus);
  const Task task = ckpt.config.task;
  const std::vector<ToxiSample> samples = Applicable(corpus, task);
  if (samples.empty()) {
    throw DataError("no test samples for task " + std::string(ToString(task)),
                    o.test.string());
  }
  const auto encoded =
      EncodeTask(samples, task, ckpt.vocab, ckpt.lexicon, ckpt.config.pad_len);
  const Prediction pred = Predict(encoded, ckpt.params, ckpt.config);
  const TaskEvaluation e = Evaluate(task, samples, pred.labels);
  out << FormatEvaluation(e);
  if (o.report) WriteFile(*o.report, Dump(ToJson(e)));
}

void RunGradcheck(const GradcheckOptions& o, std::ostream& out) {
  if (o.configs <= 0) throw DataError("--configs must be positive");
  double worst = 0.0;
  char line[160];
  for (int i = 0; i < o.configs; ++i) {
    const GradCheckCase c = RandomGradCheckCase(o.seed + static_cast<std::uint64_t>(i));
    const GradCheckResult r = GradCheck(c.params, c.batch, c.cfg, c.class_weights);
    worst = std::max(worst, r.max_rel_error);
    std::snprintf(line, sizeof line,
                  "config %d: task=%s dim=%d hidden=%d lambda=%g batch=%zu "
                  "max_rel_error=%.3e (%s)\n",
                  i + 1, std::string(ToString(c.cfg.task)).c_str(), c.cfg.dim,
                  c.cfg.hidden, c.cfg.lambda, c.batch.size(), r.max_rel_error,
                  r.worst_block.c_str());
    out << line;
  }
  const GradCheckCase c = RandomGradCheckCase(o.seed);
  GradCheckOptions corrupt;
  corrupt.corrupt = true;
  const GradCheckResult bad = GradCheck(c.params, c.batch, c.cfg, c.class_weights, corrupt);
  std::snprintf(line, sizeof line,
                "max_rel_error=%.3e corrupted_self_test=%.3e\n", worst,
                bad.max_rel_error);
  out << line;
  if (!(worst < o.tolerance)) {
    throw CheckFailure("gradient check failed: max relative error " +
                       std::to_string(worst) + " exceeds tolerance");
  }
  if (!(bad.max_rel_error > o.corrupt_threshold)) {
    throw CheckFailure("gradient check self-test did not detect a corrupted gradient");
  }
}

namespace {

struct SeedRun {
  std::map<Task, TaskEvaluation> evaluations;
  std::map<Task, json> extras;
};

// Trains one model per task for one seed and evaluates on the held-out split.
SeedRun RunSeed(const RunConfig& cfg, std::span<const ToxiSample> corpus,
                const Lexicon& lex, std::uint64_t seed, std::ostream& log) {
  const auto [train, test] =
      SplitDataset(corpus, SplitSpec{cfg.train_ratio, seed, cfg.stratify});
  const Vocab vocab = Vocab::Build(Texts(train));
  SeedRun run;

  // Upstream predictions over the whole test split, for the predicted cascade.
  std::vector<Label> toxic_pred, type_pred;
  std::vector<EncodedSample> test_all;
  if (cfg.predicted_cascade) {
    for (const auto& s : test) {
      test_all.push_back(Encode(s.text, vocab, lex, cfg.model.pad_len));
    }
  }

  for (Task task : cfg.tasks) {
    TkeConfig model = cfg.model;
    model.task = task;
    model.seed = seed;
    const auto encoded = EncodeTask(train, task, vocab, lex, model.pad_len);
    if (encoded.empty()) {
      throw DataError("no training samples for task " + std::string(ToString(task)));
    }
    const TrainResult r = Train(encoded, vocab.size(), model);
    log << Timestamp() << " seed=" << seed << " task=" << ToString(task)
        << " trained epochs=" << r.history.size() << "\n";

    std::vector<ToxiSample> eval_samples;
    json extra = {{"best_epoch", r.best_epoch},
                  {"best_val_loss", r.best_val_loss},
                  {"train_samples", encoded.size()},
                  {"history", HistoryJson(r)}};
    if (!cfg.predicted_cascade || task == Task::kToxic) {
      eval_samples = Applicable(test, task);
    } else {
      // Subtask inputs are the samples the upstream models routed here.
      std::size_t missed = 0, spurious = 0;
      for (std::size_t i = 0; i < test.size(); ++i) {
        bool reached = toxic_pred[i].cls == 1;
        if (task != Task::kType) reached = reached && type_pred[i].cls == 1;
        const bool gold = toxicn::Applicable(test[i], task);
        if (reached && gold) eval_samples.push_back(test[i]);
        missed += gold && !reached;
        spurious += reached && !gold;
      }
      extra["cascade"] = {{"mode", "predicted"},
                          {"missed", missed},
                          {"spurious", spurious}};
    }
    if (cfg.predicted_cascade && (task == Task::kToxic || task == Task::kType)) {
      auto& target = task == Task::kToxic ? toxic_pred : type_pred;
      target = Predict(test_all, r.params, model).labels;
    }
    Prediction pred;
    if (!eval_samples.empty()) {
      const auto test_enc = EncodeTask(eval_samples, task, vocab, lex, model.pad_len);
      pred = Predict(test_enc, r.params, model);
    }
    run.evaluations[task] = Evaluate(task, eval_samples, pred.labels);
    run.extras[task] = std::move(extra);
  }
  return run;
}

}  // namespace

void RunPipeline(const PipelineOptions& o, std::ostream& out) {
  const RunConfig& cfg = o.config;
  const Path reports = cfg.output_dir / "reports";
  if (!o.aggregate_only) {
    cfg.model.Validate();
    CheckExists(cfg.corpus, "corpus");
    if (!cfg.lexicon.empty()) CheckExists(cfg.lexicon, "lexicon");
    PrepareOutputDir(cfg.output_dir);
    if (cfg.predicted_cascade) {
      const std::vector<Task> order(kAllTasks.begin(), kAllTasks.end());
      if (cfg.tasks != order) {
        throw DataError("the predicted cascade needs tasks=toxic,type,group,expression");
      }
    }
    std::ofstream log(cfg.output_dir / "run.log", std::ios::trunc);
    log << Timestamp() << " start\n";

    std::vector<ToxiSample> corpus = ReadCorpus(cfg.corpus, ParseMode::kStrict);
    NormalizeCorpus(corpus);
    const Lexicon lex = LoadLexiconOrDefault(cfg.lexicon, cfg);
    WriteFile(cfg.output_dir / "stats.json", Dump(ToJson(CorpusStats(corpus))));

    for (std::uint64_t seed : cfg.seeds) {
      const SeedRun run = RunSeed(cfg, corpus, lex, seed, log);
      for (const auto& [task, e] : run.evaluations) {
        json j = ToJson(e);
        j["seed"] = seed;
        j["cascade"] = cfg.predicted_cascade ? "predicted" : "gold";
        j["training"] = run.extras.at(task);
        const std::string stem =
            "seed-" + std::to_string(seed) + "-" + std::string(ToString(task));
        WriteFile(reports / (stem + ".json"), Dump(j));
        WriteFile(reports / (stem + ".txt"), FormatEvaluation(e));
      }
      out << "seed " << seed << " done\n";
    }
    log << Timestamp() << " finished\n";
  }
  const json summary = AggregateReports(reports);
  WriteFile(cfg.output_dir / "summary.json", Dump(summary));
  const std::string table = FormatAggregate(summary);
  WriteFile(cfg.output_dir / "summary.txt", table);
  out << table;
}

void RunKappa(const Path& in, std::ostream& out) {
  RatingMatrix m = [&] {
    try {
      return RatingMatrix::Load(in);
    } catch (const ArgumentError& e) {
      throw DataError(e.what(), in.string());
    }
  }();
  char line[128];
  std::snprintf(line, sizeof line, "items=%zu categories=%zu raters=%d kappa=%.6f\n",
                m.items(), m.categories(), m.raters(), FleissKappa(m));
  out << line;
}

}  // namespace toxicn::cli
