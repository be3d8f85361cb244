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

#include "cli.hpp"

#include <exception>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"

namespace toxicn::cli {

namespace {

// Flags shared by train and pipeline. Each maps onto a configuration key and
// is applied after the config file, so the command line wins.
struct RunFlags {
  std::optional<std::string> config;
  std::map<std::string, std::optional<std::string>> values;
  std::vector<std::string> sets;

  void Attach(CLI::App* cmd, const std::vector<std::pair<std::string, std::string>>& flags) {
    cmd->add_option("--config", config, "key=value run configuration file");
    for (const auto& [flag, key] : flags) {
      cmd->add_option("--" + flag, values[key], "overrides '" + key + "'");
    }
    cmd->add_option("--set", sets, "any configuration key as key=value");
  }

  RunConfig Resolve() const {
    RunConfig cfg;
    if (config) cfg = LoadRunConfig(std::filesystem::path(*config));
    for (const auto& [key, value] : values) {
      if (value) ApplySetting(cfg, key, *value);
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw DataError("--set expects key=value, got '" + kv + "'");
      ApplySetting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }
};

const std::vector<std::pair<std::string, std::string>> kRunFlags = {
    {"in", "corpus"},        {"lexicon", "lexicon"},
    {"resources", "resources"}, {"task", "task"},
    {"tasks", "tasks"},      {"seed", "seed"},
    {"seeds", "seeds"},      {"epochs", "epochs"},
    {"lambda", "lambda"},    {"dim", "dim"},
    {"cascade", "cascade"},  {"stratify", "stratify"},
    {"tke", "knowledge_enhancement"},
};

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chinese toxic language toolkit: corpus tools, insult lexicon, "
               "variant generation, pseudo-labeling and a knowledge-enhanced "
               "classifier."};
  app.name("toxicn");
  app.require_subcommand(1);
  app.fallthrough();

  NormalizeOptions norm;
  std::string norm_in, norm_out, norm_exclude;
  auto* normalize = app.add_subcommand("normalize", "clean and deduplicate raw comments");
  normalize->add_option("--in", norm_in, "raw JSON Lines with id and text")->required();
  normalize->add_option("--out", norm_out, "cleaned JSON Lines")->required();
  normalize->add_option("--min-chars", norm.min_chars, "minimum content characters");
  normalize->add_option("--exclude", norm_exclude, "file of ids to drop");

  MatchOptions match;
  std::string match_lex, match_in, match_out;
  auto* match_cmd = app.add_subcommand("match", "find lexicon terms in documents");
  match_cmd->add_option("--lexicon", match_lex, "lexicon TSV")->required();
  match_cmd->add_option("--in", match_in, "JSON Lines with id and text")->required();
  match_cmd->add_option("--out", match_out, "matches as JSON Lines")->required();

  DeriveOptions derive;
  std::string derive_resources;
  auto* derive_cmd = app.add_subcommand("derive", "generate lexical variants of a term");
  derive_cmd->add_option("--term", derive.term, "source term")->required();
  derive_cmd->add_option("--rule", derive.rule,
                         "homophonic, abbreviation, code_mixing, deformation or all");
  derive_cmd->add_option("--limit", derive.limit, "maximum homophone variants (0 = all)");
  derive_cmd->add_option("--resources", derive_resources, "directory with pinyin.tsv and glyph.tsv");

  PseudolabelOptions pl;
  std::string pl_lex, pl_in, pl_accept, pl_out, pl_report, pl_lex_out;
  auto* pseudo = app.add_subcommand("pseudolabel", "lexicon-based pseudo-labeling to a fixpoint");
  pseudo->add_option("--lexicon", pl_lex, "seed lexicon TSV")->required();
  pseudo->add_option("--in", pl_in, "JSON Lines with id and text")->required();
  pseudo->add_option("--accept", pl_accept, "terms approved for the lexicon");
  pseudo->add_option("--out", pl_out, "labels as JSON Lines")->required();
  pseudo->add_option("--report", pl_report, "candidate terms TSV");
  pseudo->add_option("--lexicon-out", pl_lex_out, "grown lexicon TSV");
  pseudo->add_option("--min-freq", pl.min_freq, "minimum pseudo-toxic document frequency");
  pseudo->add_option("--min-score", pl.min_score, "minimum (toxic+1)/(clean+1)");
  pseudo->add_option("--max-n", pl.max_n, "longest candidate n-gram");

  std::string validate_in;
  auto* validate = app.add_subcommand("validate", "check label hierarchy of a corpus");
  validate->add_option("--in", validate_in, "corpus JSON Lines")->required();

  StatsOptions stats;
  std::string stats_in, stats_json;
  auto* stats_cmd = app.add_subcommand("stats", "corpus statistics by topic and group");
  stats_cmd->add_option("--in", stats_in, "corpus JSON Lines")->required();
  stats_cmd->add_option("--json", stats_json, "write the report as JSON");

  RunFlags train_flags;
  std::string train_out = "toxicn_model";
  bool train_no_split = false;
  auto* train = app.add_subcommand("train", "train a classifier for one task");
  train_flags.Attach(train, kRunFlags);
  train->add_option("--out", train_out, "output directory");
  train->add_flag("--no-split", train_no_split, "train on the whole corpus");

  EvalOptions eval;
  std::string eval_model, eval_test, eval_report;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a labeled corpus");
  eval_cmd->add_option("--model", eval_model, "checkpoint JSON")->required();
  eval_cmd->add_option("--test", eval_test, "corpus JSON Lines")->required();
  eval_cmd->add_option("--report", eval_report, "write the report as JSON");

  GradcheckOptions grad;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("--configs", grad.configs, "number of random configurations");
  gradcheck->add_option("--seed", grad.seed, "first configuration seed");

  RunFlags pipe_flags;
  std::string pipe_out;
  bool aggregate_only = false;
  auto* pipeline = app.add_subcommand("pipeline", "train and evaluate every task over a seed list");
  pipe_flags.Attach(pipeline, kRunFlags);
  pipeline->add_option("--out", pipe_out, "output directory");
  pipeline->add_flag("--aggregate-only", aggregate_only,
                     "summarize the per-seed reports already on disk");

  std::string kappa_in;
  auto* kappa = app.add_subcommand("kappa", "Fleiss' kappa of a rating matrix");
  kappa->add_option("--in", kappa_in, "TSV: item, then one count per category")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    if (e.get_name() != "CallForHelp") err << app.help();
    return kExitUsage;
  }

  try {
    if (*normalize) {
      norm.in = norm_in;
      norm.out = norm_out;
      if (!norm_exclude.empty()) norm.exclude = norm_exclude;
      RunNormalize(norm, out);
    } else if (*match_cmd) {
      match = {match_lex, match_in, match_out};
      RunMatch(match, out);
    } else if (*derive_cmd) {
      RunConfig base;
      if (!derive_resources.empty()) base.resources = derive_resources;
      derive.resources = ResourceDir(base);
      RunDerive(derive, out);
    } else if (*pseudo) {
      pl.lexicon = pl_lex;
      pl.in = pl_in;
      pl.out = pl_out;
      if (!pl_accept.empty()) pl.accept = pl_accept;
      if (!pl_report.empty()) pl.report = pl_report;
      if (!pl_lex_out.empty()) pl.lexicon_out = pl_lex_out;
      RunPseudolabel(pl, out);
    } else if (*validate) {
      if (RunValidate(validate_in, out, err) != 0) return kExitData;
    } else if (*stats_cmd) {
      stats.in = stats_in;
      if (!stats_json.empty()) stats.json = stats_json;
      RunStats(stats, out);
    } else if (*train) {
      RunTrain({train_flags.Resolve(), train_out, train_no_split}, out);
    } else if (*eval_cmd) {
      eval.model = eval_model;
      eval.test = eval_test;
      if (!eval_report.empty()) eval.report = eval_report;
      RunEval(eval, out);
    } else if (*gradcheck) {
      RunGradcheck(grad, out);
    } else if (*pipeline) {
      RunConfig cfg = pipe_flags.Resolve();
      if (!pipe_out.empty()) cfg.output_dir = pipe_out;
      RunPipeline({cfg, aggregate_only}, out);
    } else if (*kappa) {
      RunKappa(kappa_in, out);
    }
  } catch (const CheckFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheck;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitCheck;
  }
  return kExitOk;
}

}  // namespace toxicn::cli
