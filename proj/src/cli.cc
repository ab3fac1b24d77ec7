// Copyright 2026 The propspan Authors.
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

#include "propspan/cli.h"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "propspan/corpus.h"
#include "propspan/crf.h"
#include "propspan/emissions.h"
#include "propspan/errors.h"
#include "propspan/eval.h"
#include "propspan/kernels.h"
#include "propspan/pipeline.h"
#include "propspan/span_post.h"
#include "propspan/stacker.h"
#include "propspan/synth.h"
#include "propspan/tc_rules.h"
#include "propspan/textnorm.h"

namespace propspan {
namespace {

std::string Fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("error writing " + path);
}

struct GlobalOptions {
  uint64_t seed = 1;
  std::string techniques;
  std::string stopwords;
  size_t workers = 1;
  std::string kernels = "auto";

  TechniqueSet LoadTechniques() const {
    return techniques.empty() ? TechniqueSet::Default() : TechniqueSet::Load(techniques);
  }
  StopwordList LoadStopwords() const {
    return stopwords.empty() ? StopwordList::Default() : StopwordList::Load(stopwords);
  }
};

void PrintSiScore(std::ostream &out, const SiScore &s) {
  out << "precision\t" << Fixed(s.precision) << "\n"
      << "recall\t" << Fixed(s.recall) << "\n"
      << "f1\t" << Fixed(s.f1) << "\n"
      << "predicted_spans\t" << s.predicted_spans << "\n"
      << "gold_spans\t" << s.gold_spans << "\n";
}

void PrintTcScore(std::ostream &out, const TcScore &s, const TechniqueSet &techniques) {
  out << "micro_f1\t" << Fixed(s.micro_f1) << "\n"
      << "matches\t" << s.matches << "\n"
      << "total\t" << s.total << "\n";
  for (const auto &[t, c] : s.per_technique) {
    out << "technique\t" << techniques.name(t) << "\tgold=" << c.gold
        << "\tpredicted=" << c.predicted << "\tcorrect=" << c.correct << "\n";
  }
}

void WriteAblation(std::ostream &out, const std::string &prefix,
                   const std::vector<AblationRow> &rows) {
  WriteText(prefix + ".ablation.tsv", FormatAblationTsv(rows));
  out << FormatAblationTable(rows);
}

// --- si ----------------------------------------------------------------------

struct SiOptions {
  std::string articles;
  std::vector<std::string> emissions;
  std::vector<std::string> crf;
  std::string out;
  std::string gold;
  bool merge_gold = false;
  bool ablation = false;
  bool no_crf = false, no_trim = false, no_quotes = false, no_ensemble = false;
  bool quotes_first = false;
};

void AddSi(CLI::App &app, SiOptions &o) {
  CLI::App *sub = app.add_subcommand("si", "Decode propaganda spans from emission scores");
  sub->add_option("--articles", o.articles, "Directory of article<ID>.txt files")->required();
  sub->add_option("--emissions", o.emissions,
                  "Emission JSONL file, one per ensemble member (repeatable)")
      ->required();
  sub->add_option("--crf", o.crf, "CRF parameter file, one per member or one shared");
  sub->add_option("--out", o.out, "Output span TSV")->required();
  sub->add_option("--gold", o.gold, "Gold span TSV; prints scores when given");
  sub->add_flag("--merge-gold", o.merge_gold, "Merge overlapping gold spans before scoring");
  sub->add_flag("--ablation", o.ablation,
                "Write every cumulative stage (<out>.stageN.tsv) and a report; needs --gold");
  sub->add_flag("--no-crf", o.no_crf, "Per-token argmax instead of Viterbi");
  sub->add_flag("--no-trim", o.no_trim, "Skip trimming spans to alphanumeric ends");
  sub->add_flag("--no-quotes", o.no_quotes, "Skip quote expansion");
  sub->add_flag("--no-ensemble", o.no_ensemble, "Use only the first emission file");
  sub->add_flag("--quotes-first", o.quotes_first, "Expand quotes before trimming");
}

int RunSi(const SiOptions &o, const GlobalOptions &g, std::ostream &out) {
  if (o.ablation && o.gold.empty()) throw UsageError("--ablation needs --gold");
  if (o.crf.empty() && (!o.no_crf || o.ablation)) {
    throw UsageError("--crf is required unless --no-crf is given (and --ablation is not)");
  }
  const std::vector<Article> articles = LoadArticles(o.articles);
  std::vector<std::vector<EmissionRecord>> members;
  for (const std::string &path : o.emissions) {
    members.push_back(ReadEmissions(path));
    CheckEmissionsAlignment(members.back(), articles, path);
  }
  std::vector<CrfParams> params;
  for (const std::string &path : o.crf) params.push_back(LoadCrfParams(path));

  SiPipelineConfig config;
  config.stages.crf = !o.no_crf;
  config.stages.trim = !o.no_trim;
  config.stages.quotes = !o.no_quotes;
  config.stages.quotes_first = o.quotes_first;
  config.ensemble = !o.no_ensemble;
  config.workers = g.workers;

  const SiLabels predicted = PredictSi(articles, members, params, config);
  SaveSiLabels(o.out, predicted);
  if (o.gold.empty()) return 0;

  const SiLabels gold = LoadSiLabels(o.gold, articles);
  SiScoreOptions score_options;
  score_options.merge_gold = o.merge_gold;
  PrintSiScore(out, ScoreSi(predicted, gold, articles, score_options));
  if (!o.ablation) return 0;

  std::vector<AblationRow> rows;
  const std::vector<SiPipelineConfig> stages = SiAblationConfigs(config);
  for (size_t i = 0; i < stages.size(); ++i) {
    const SiLabels stage = PredictSi(articles, members, params, stages[i]);
    SaveSiLabels(o.out + ".stage" + std::to_string(i + 1) + ".tsv", stage);
    rows.push_back(
        MakeAblationRow(SiAblationStages()[i], ScoreSi(stage, gold, articles, score_options)));
  }
  WriteAblation(out, o.out, rows);
  return 0;
}

// --- tc ----------------------------------------------------------------------

struct TcOptions {
  std::string articles;
  std::string rows;
  std::vector<std::string> probs;
  std::string memory, nesting, stacker;
  std::string train_articles, train_labels;
  std::string out;
  std::string gold;
  bool ablation = false;
  bool no_ensemble = false, no_stacker = false, no_bonus = false, no_repetition = false,
       no_subspan = false, no_multilabel = false;
  size_t primary_member = 0;  // 1-based; 0 means the last member
  TcRuleConfig rules;
};

void AddTc(CLI::App &app, TcOptions &o) {
  CLI::App *sub = app.add_subcommand("tc", "Assign techniques to given spans");
  sub->add_option("--articles", o.articles, "Directory of article<ID>.txt files")->required();
  sub->add_option("--rows", o.rows, "TC rows TSV (label column ignored)")->required();
  sub->add_option("--probs", o.probs,
                  "Per-row probability JSONL, one per ensemble member (repeatable)")
      ->required();
  sub->add_option("--memory", o.memory, "Training span memory TSV (build-memory)");
  sub->add_option("--nesting", o.nesting, "Nesting table TSV (build-nesting)");
  sub->add_option("--train-articles", o.train_articles,
                  "Training articles; with --train-labels, builds memory and nesting tables");
  sub->add_option("--train-labels", o.train_labels, "Training TC labels TSV");
  sub->add_option("--stacker", o.stacker, "Stacker model JSON (train-stacker)");
  sub->add_option("--out", o.out, "Output TC TSV, line-aligned with --rows")->required();
  sub->add_option("--gold", o.gold, "Gold TC TSV; prints scores when given");
  sub->add_flag("--ablation", o.ablation,
                "Write every cumulative stage (<out>.stageN.tsv) and a report; needs --gold");
  sub->add_flag("--no-ensemble", o.no_ensemble, "Use one member instead of stacking");
  sub->add_flag("--no-stacker", o.no_stacker, "Same as --no-ensemble");
  sub->add_flag("--no-bonus", o.no_bonus, "Skip the seen-span bonus");
  sub->add_flag("--no-repetition", o.no_repetition, "Skip the Repetition rule");
  sub->add_flag("--no-subspan", o.no_subspan, "Skip the span/subspan check");
  sub->add_flag("--no-multilabel", o.no_multilabel,
                "Give every row of a span the top technique");
  sub->add_option("--primary-member", o.primary_member,
                  "Member used without ensembling, counted from 1 (default: last)");
  sub->add_option("--rep-min-matches", o.rules.rep_min_other_matches,
                  "Other same-key spans that force Repetition")
      ->capture_default_str();
  sub->add_option("--rep-single-threshold", o.rules.rep_single_match_threshold,
                  "P(Repetition) above which one match forces Repetition")
      ->capture_default_str();
  sub->add_option("--rep-keep-threshold", o.rules.rep_zero_match_keep_threshold,
                  "P(Repetition) kept for spans with no match")
      ->capture_default_str();
  sub->add_option("--seen-bonus", o.rules.seen_span_bonus,
                  "Score added to techniques seen with the span in training")
      ->capture_default_str();
  sub->add_option("--subspan-factor", o.rules.subspan_max_drop_factor,
                  "Veto a subspan zeroing that divides the top score by more than this")
      ->capture_default_str();
}

struct TcContext {
  TechniqueSet techniques;
  StopwordList stopwords;
  std::vector<Article> articles;
  std::vector<TcRow> rows;
  std::vector<std::vector<std::vector<double>>> members;
  std::optional<TrainingSpanMemory> memory;
  std::optional<NestingTable> nesting;
  std::optional<StackerModel> stacker;

  TcCascadeInputs Inputs() const {
    TcCascadeInputs in;
    in.rows = rows;
    in.members = members;
    in.articles = articles;
    in.stopwords = &stopwords;
    in.techniques = &techniques;
    in.memory = memory ? &*memory : nullptr;
    in.nesting = nesting ? &*nesting : nullptr;
    in.stacker = stacker ? &*stacker : nullptr;
    return in;
  }
};

int RunTc(TcOptions o, const GlobalOptions &g, std::ostream &out) {
  if (o.ablation && o.gold.empty()) throw UsageError("--ablation needs --gold");
  if (o.train_articles.empty() != o.train_labels.empty()) {
    throw UsageError("--train-articles and --train-labels go together");
  }
  TcContext ctx{g.LoadTechniques(), g.LoadStopwords(), {}, {}, {}, {}, {}, {}};
  ctx.articles = LoadArticles(o.articles);
  ctx.rows = LoadTcRows(o.rows, ctx.articles, false, ctx.techniques);
  for (const std::string &path : o.probs) {
    ctx.members.push_back(
        AlignTcProbs(ctx.rows, ReadTcProbs(path, ctx.techniques.size()), path));
  }
  if (!o.train_articles.empty()) {
    const std::vector<Article> train_articles = LoadArticles(o.train_articles);
    const std::vector<TcRow> train_rows =
        LoadTcRows(o.train_labels, train_articles, true, ctx.techniques);
    ctx.memory = TrainingSpanMemory::Build(train_rows, train_articles, ctx.stopwords);
    ctx.nesting = NestingTable::Build(train_rows);
  }
  if (!o.memory.empty()) ctx.memory = TrainingSpanMemory::Load(o.memory, ctx.techniques);
  if (!o.nesting.empty()) ctx.nesting = NestingTable::Load(o.nesting, ctx.techniques);
  if (!o.stacker.empty()) ctx.stacker = LoadStacker(o.stacker);

  TcRuleConfig config = o.rules;
  config.stages.ensemble = !(o.no_ensemble || o.no_stacker);
  config.stages.bonus = !o.no_bonus;
  config.stages.repetition = !o.no_repetition;
  config.stages.subspan = !o.no_subspan;
  config.stages.multilabel = !o.no_multilabel;
  if (o.primary_member > 0) config.stages.primary_member = o.primary_member - 1;

  const std::vector<TechniqueId> labels = RunCascade(ctx.Inputs(), config, g.workers);
  const std::vector<TcRow> predicted = LabelRows(ctx.rows, labels);
  SaveTcRows(o.out, predicted, ctx.techniques);
  if (o.gold.empty()) return 0;

  const std::vector<TcRow> gold = LoadTcRows(o.gold, ctx.articles, true, ctx.techniques);
  PrintTcScore(out, ScoreTc(predicted, gold), ctx.techniques);
  if (!o.ablation) return 0;

  std::vector<AblationRow> rows;
  const std::vector<TcRuleConfig> stages = TcAblationConfigs(config);
  for (size_t i = 0; i < stages.size(); ++i) {
    const std::vector<TcRow> stage =
        LabelRows(ctx.rows, RunCascade(ctx.Inputs(), stages[i], g.workers));
    SaveTcRows(o.out + ".stage" + std::to_string(i + 1) + ".tsv", stage, ctx.techniques);
    rows.push_back(MakeAblationRow(TcAblationStages()[i], ScoreTc(stage, gold)));
  }
  WriteAblation(out, o.out, rows);
  return 0;
}

// --- training ----------------------------------------------------------------

struct TrainCrfOptions {
  std::string articles, labels, emissions, out;
  double heldout = 0.1;
  bool hard_mask = false;
  CrfTrainConfig config;
};

void AddTrainCrf(CLI::App &app, TrainCrfOptions &o) {
  CLI::App *sub = app.add_subcommand("train-crf", "Train CRF transition parameters");
  sub->add_option("--articles", o.articles, "Directory of article<ID>.txt files")->required();
  sub->add_option("--labels", o.labels, "Gold span TSV")->required();
  sub->add_option("--emissions", o.emissions, "Emission JSONL for the same articles")
      ->required();
  sub->add_option("--out", o.out, "Output CRF parameter file")->required();
  sub->add_option("--heldout-fraction", o.heldout, "Share of articles held out")
      ->capture_default_str();
  sub->add_option("--epochs", o.config.epochs, "Gradient steps")->capture_default_str();
  sub->add_option("--lr", o.config.learning_rate, "Learning rate")->capture_default_str();
  sub->add_option("--l2", o.config.l2, "L2 penalty")->capture_default_str();
  sub->add_option("--init-scale", o.config.init_scale, "Initial weight range")
      ->capture_default_str();
  sub->add_flag("--hard-mask", o.hard_mask,
                "Forbid O->I-PROP transitions and a leading I-PROP outright");
}

int RunTrainCrf(TrainCrfOptions o, const GlobalOptions &g, std::ostream &out) {
  const std::vector<Article> articles = LoadArticles(o.articles);
  const SiLabels gold = LoadSiLabels(o.labels, articles);
  const std::vector<EmissionRecord> records = ReadEmissions(o.emissions);
  CheckEmissionsAlignment(records, articles, o.emissions);
  std::map<std::string, const EmissionRecord *> by_id;
  for (const EmissionRecord &r : records) by_id[r.article_id] = &r;

  const CorpusSplit split = SplitTrainDev(articles, o.heldout, g.seed);
  auto sequences = [&](const std::vector<Article> &part) {
    std::vector<LabeledSequence> seqs;
    for (const Article &a : part) {
      auto it = by_id.find(a.id);
      if (it == by_id.end() || it->second->tokens.empty()) continue;
      const std::vector<Token> tokens = Tokenize(a);
      auto spans = gold.find(a.id);
      const std::vector<CharSpan> none;
      seqs.push_back({it->second->scores,
                      EncodeBio(tokens, spans == gold.end() ? none : spans->second)});
    }
    return seqs;
  };
  const std::vector<LabeledSequence> train = sequences(split.train);
  const std::vector<LabeledSequence> heldout = sequences(split.heldout);
  if (train.empty()) throw ConfigError("no training articles with emissions");

  o.config.seed = g.seed;
  if (o.hard_mask) o.config.mask = CrfMask::Bio();
  const CrfParams params = TrainCrf(train, o.config, heldout);
  SaveCrfParams(o.out, params);

  std::vector<std::vector<EmissionRecord>> member{records};
  const std::vector<CrfParams> param_list{params};
  SiPipelineConfig config;
  config.workers = g.workers;
  const SiLabels predicted = PredictSi(split.heldout, member, param_list, config);
  SiLabels heldout_gold;
  for (const Article &a : split.heldout) {
    auto it = gold.find(a.id);
    if (it != gold.end()) heldout_gold[a.id] = it->second;
  }
  out << "heldout_articles\t" << split.heldout.size() << "\n";
  out << "heldout_si_f1\t" << Fixed(ScoreSi(predicted, heldout_gold).f1) << "\n";
  return 0;
}

struct TrainEmitterOptions {
  std::string articles, labels, out;
  double heldout = 0.1;
  FeatureScorerTrainConfig config;
};

void AddTrainEmitter(CLI::App &app, TrainEmitterOptions &o) {
  CLI::App *sub =
      app.add_subcommand("train-emitter", "Train the feature-based emission scorer");
  sub->add_option("--articles", o.articles, "Directory of article<ID>.txt files")->required();
  sub->add_option("--labels", o.labels, "Gold span TSV")->required();
  sub->add_option("--out", o.out, "Output model JSON")->required();
  sub->add_option("--heldout-fraction", o.heldout, "Share of articles held out")
      ->capture_default_str();
  sub->add_option("--epochs", o.config.epochs, "Gradient steps")->capture_default_str();
  sub->add_option("--lr", o.config.learning_rate, "Learning rate")->capture_default_str();
  sub->add_option("--l2", o.config.l2, "L2 penalty")->capture_default_str();
  sub->add_option("--init-scale", o.config.init_scale, "Initial weight range")
      ->capture_default_str();
}

int RunTrainEmitter(TrainEmitterOptions o, const GlobalOptions &g, std::ostream &out) {
  const std::vector<Article> articles = LoadArticles(o.articles);
  const SiLabels gold = LoadSiLabels(o.labels, articles);
  const CorpusSplit split = SplitTrainDev(articles, o.heldout, g.seed);
  o.config.seed = g.seed;
  const FeatureScorerModel model =
      TrainFeatureScorer(BuildTaggedCorpus(split.train, gold), o.config);
  SaveFeatureScorer(o.out, model);

  size_t correct = 0, total = 0;
  for (const TaggedSentence &s : BuildTaggedCorpus(split.heldout, gold)) {
    const Matrix scores = ScoreTokens(model, s.tokens);
    const TagSequence tags = DecodeTags(scores, CrfParams(), false);
    for (size_t t = 0; t < tags.size(); ++t) correct += tags[t] == s.tags[t];
    total += tags.size();
  }
  out << "features\t" << model.features.size() << "\n";
  out << "heldout_token_accuracy\t"
      << Fixed(total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0) << "\n";
  return 0;
}

struct EmitOptions {
  std::string articles, model, out;
};

void AddEmit(CLI::App &app, EmitOptions &o) {
  CLI::App *sub = app.add_subcommand("emit", "Write emission scores from a trained emitter");
  sub->add_option("--articles", o.articles, "Directory of article<ID>.txt files")->required();
  sub->add_option("--model", o.model, "Emitter model JSON (train-emitter)")->required();
  sub->add_option("--out", o.out, "Output emission JSONL")->required();
}

int RunEmit(const EmitOptions &o) {
  const std::vector<Article> articles = LoadArticles(o.articles);
  SaveEmissions(o.out, EmitCorpus(LoadFeatureScorer(o.model), articles));
  return 0;
}

struct TrainStackerOptions {
  std::string articles, labels, out;
  std::vector<std::string> probs;
  StackerTrainConfig config;
};

void AddTrainStacker(CLI::App &app, TrainStackerOptions &o) {
  CLI::App *sub = app.add_subcommand("train-stacker",
                                     "Train the stacking combiner on development data");
  sub->add_option("--articles", o.articles, "Development article directory")->required();
  sub->add_option("--labels", o.labels, "Development gold TC TSV")->required();
  sub->add_option("--probs", o.probs, "Member probability JSONL (repeatable, in order)")
      ->required();
  sub->add_option("--out", o.out, "Output stacker JSON")->required();
  sub->add_option("--dev-fraction", o.config.dev_fraction,
                  "Share of development articles used for fitting; the rest is scored")
      ->capture_default_str();
  sub->add_option("--epochs", o.config.epochs, "Gradient steps")->capture_default_str();
  sub->add_option("--lr", o.config.learning_rate, "Learning rate")->capture_default_str();
  sub->add_option("--l2", o.config.l2, "L2 penalty")->capture_default_str();
  sub->add_option("--init-scale", o.config.init_scale, "Initial weight range")
      ->capture_default_str();
}

int RunTrainStacker(TrainStackerOptions o, const GlobalOptions &g, std::ostream &out) {
  const TechniqueSet techniques = g.LoadTechniques();
  const std::vector<Article> articles = LoadArticles(o.articles);
  const std::vector<TcRow> rows = LoadTcRows(o.labels, articles, true, techniques);
  std::vector<std::vector<std::vector<double>>> members;
  for (const std::string &path : o.probs) {
    members.push_back(AlignTcProbs(rows, ReadTcProbs(path, techniques.size()), path));
  }
  if (!(o.config.dev_fraction > 0.0 && o.config.dev_fraction <= 1.0)) {
    throw ConfigError("--dev-fraction must lie in (0, 1]");
  }
  std::set<std::string> fit_ids;
  std::vector<TcRow> fit_rows, score_rows;
  if (o.config.dev_fraction < 1.0) {
    const CorpusSplit split = SplitTrainDev(articles, 1.0 - o.config.dev_fraction, g.seed);
    for (const Article &a : split.train) fit_ids.insert(a.id);
  } else {
    for (const Article &a : articles) fit_ids.insert(a.id);
  }
  for (const TcRow &r : rows) (fit_ids.count(r.article_id) ? fit_rows : score_rows).push_back(r);

  o.config.seed = g.seed;
  const StackerModel model =
      TrainStacker(BuildStackerExamples(fit_rows, members, techniques.size()), o.config);
  SaveStacker(o.out, model);

  size_t correct = 0;
  for (const StackerExample &ex : BuildStackerExamples(score_rows, members, techniques.size())) {
    correct += ArgmaxTechnique(StackPredict(ex.member_probs, model)) == ex.gold;
  }
  out << "fit_rows\t" << fit_rows.size() << "\n";
  out << "heldout_rows\t" << score_rows.size() << "\n";
  out << "heldout_accuracy\t"
      << Fixed(score_rows.empty() ? 0.0
                                  : static_cast<double>(correct) /
                                        static_cast<double>(score_rows.size()))
      << "\n";
  return 0;
}

struct TableOptions {
  std::string articles, labels, out;
};

void AddTable(CLI::App &app, const std::string &name, const std::string &what,
              TableOptions &o) {
  CLI::App *sub = app.add_subcommand(name, what);
  sub->add_option("--articles", o.articles, "Training article directory")->required();
  sub->add_option("--labels", o.labels, "Training TC labels TSV")->required();
  sub->add_option("--out", o.out, "Output TSV")->required();
}

int RunBuildMemory(const TableOptions &o, const GlobalOptions &g, std::ostream &out) {
  const TechniqueSet techniques = g.LoadTechniques();
  const std::vector<Article> articles = LoadArticles(o.articles);
  const std::vector<TcRow> rows = LoadTcRows(o.labels, articles, true, techniques);
  const TrainingSpanMemory memory =
      TrainingSpanMemory::Build(rows, articles, g.LoadStopwords());
  memory.Save(o.out, techniques);
  out << "keys\t" << memory.size() << "\n";
  return 0;
}

int RunBuildNesting(const TableOptions &o, const GlobalOptions &g, std::ostream &out) {
  const TechniqueSet techniques = g.LoadTechniques();
  const std::vector<Article> articles = LoadArticles(o.articles);
  const NestingTable table =
      NestingTable::Build(LoadTcRows(o.labels, articles, true, techniques));
  table.Save(o.out, techniques);
  out << "pairs\t" << table.size() << "\n";
  return 0;
}

// --- scoring -----------------------------------------------------------------

struct ScoreOptions {
  std::string articles, pred, gold;
  bool merge_gold = false;
};

void AddScore(CLI::App &app, const std::string &name, const std::string &what,
              ScoreOptions &o, bool si) {
  CLI::App *sub = app.add_subcommand(name, what);
  sub->add_option("--articles", o.articles, "Directory of article<ID>.txt files")->required();
  sub->add_option("--pred", o.pred, "Predicted TSV")->required();
  sub->add_option("--gold", o.gold, "Gold TSV")->required();
  if (si) {
    sub->add_flag("--merge-gold", o.merge_gold, "Merge overlapping gold spans first");
  }
}

int RunScoreSi(const ScoreOptions &o, std::ostream &out) {
  const std::vector<Article> articles = LoadArticles(o.articles);
  SiScoreOptions options;
  options.merge_gold = o.merge_gold;
  PrintSiScore(out, ScoreSi(LoadSiLabels(o.pred, articles), LoadSiLabels(o.gold, articles),
                            articles, options));
  return 0;
}

int RunScoreTc(const ScoreOptions &o, const GlobalOptions &g, std::ostream &out) {
  const TechniqueSet techniques = g.LoadTechniques();
  const std::vector<Article> articles = LoadArticles(o.articles);
  PrintTcScore(out,
               ScoreTc(LoadTcRows(o.pred, articles, true, techniques),
                       LoadTcRows(o.gold, articles, true, techniques)),
               techniques);
  return 0;
}

struct SynthOptions {
  std::string out;
  size_t articles = 100;
};

void AddSynth(CLI::App &app, SynthOptions &o) {
  CLI::App *sub = app.add_subcommand("synth", "Write a synthetic demo dataset");
  sub->add_option("--out", o.out, "Output directory")->required();
  sub->add_option("--articles", o.articles, "SI articles (TC splits get half as many each)")
      ->capture_default_str();
}

int Dispatch(CLI::App &app, const GlobalOptions &g, std::ostream &out, SiOptions &si,
             TcOptions &tc, TrainCrfOptions &train_crf, TrainEmitterOptions &train_emitter,
             EmitOptions &emit, TrainStackerOptions &train_stacker, TableOptions &memory,
             TableOptions &nesting, ScoreOptions &score_si, ScoreOptions &score_tc,
             SynthOptions &synth) {
  kernels::SetIsa(kernels::ParseIsa(g.kernels));
  if (g.workers == 0) throw UsageError("--workers must be at least 1");
  auto parsed = [&](const char *name) { return app.get_subcommand(name)->parsed(); };
  if (parsed("si")) return RunSi(si, g, out);
  if (parsed("tc")) return RunTc(tc, g, out);
  if (parsed("train-crf")) return RunTrainCrf(train_crf, g, out);
  if (parsed("train-emitter")) return RunTrainEmitter(train_emitter, g, out);
  if (parsed("emit")) return RunEmit(emit);
  if (parsed("train-stacker")) return RunTrainStacker(train_stacker, g, out);
  if (parsed("build-memory")) return RunBuildMemory(memory, g, out);
  if (parsed("build-nesting")) return RunBuildNesting(nesting, g, out);
  if (parsed("score-si")) return RunScoreSi(score_si, out);
  if (parsed("score-tc")) return RunScoreTc(score_tc, g, out);
  if (parsed("synth")) {
    WriteSynthDataset(synth.out, synth.articles, g.seed, g.LoadStopwords());
    return 0;
  }
  throw UsageError("no subcommand given");
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app("Propaganda span identification and technique classification", "propspan");
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--techniques", g.techniques, "Technique list file (default: built in)");
  app.add_option("--stopwords", g.stopwords, "Stopword list file (default: built in)");
  app.add_option("--workers", g.workers, "Worker threads for per-article work")
      ->capture_default_str();
  app.add_option("--kernels", g.kernels, "Dense kernel set: auto, scalar or avx2")
      ->capture_default_str();

  SiOptions si;
  TcOptions tc;
  TrainCrfOptions train_crf;
  TrainEmitterOptions train_emitter;
  EmitOptions emit;
  TrainStackerOptions train_stacker;
  TableOptions memory, nesting;
  ScoreOptions score_si, score_tc;
  SynthOptions synth;
  AddSi(app, si);
  AddTc(app, tc);
  AddTrainCrf(app, train_crf);
  AddTrainEmitter(app, train_emitter);
  AddEmit(app, emit);
  AddTrainStacker(app, train_stacker);
  AddTable(app, "build-memory", "Build the training span memory", memory);
  AddTable(app, "build-nesting", "Build the technique nesting table", nesting);
  AddScore(app, "score-si", "Score predicted spans", score_si, true);
  AddScore(app, "score-tc", "Score predicted techniques", score_tc, false);
  AddSynth(app, synth);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  try {
    return Dispatch(app, g, out, si, tc, train_crf, train_emitter, emit, train_stacker, memory,
                    nesting, score_si, score_tc, synth);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError &e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const IoError &e) {
    err << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError &e) {
    err << "format error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError &e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation &e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace propspan
