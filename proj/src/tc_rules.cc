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

#include "propspan/tc_rules.h"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "jsonl.h"
#include "parallel.h"
#include "propspan/errors.h"

namespace propspan {

using nlohmann::json;

namespace {

std::ifstream OpenInput(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream OpenOutput(const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1) {
    fields.push_back(line.substr(start, tab - start));
  }
  fields.push_back(line.substr(start));
  return fields;
}

TechniqueId RequireTechnique(const TechniqueSet &techniques, const std::string &name,
                             const std::string &what, size_t line) {
  const auto id = techniques.Find(name);
  if (!id) throw FormatError(Located(what, line, "unknown technique '" + name + "'"));
  return *id;
}

double MaxScore(std::span<const double> scores) {
  return *std::max_element(scores.begin(), scores.end());
}

}  // namespace

// --- probability files -----------------------------------------------------

std::vector<TcProbRecord> ParseTcProbs(std::istream &in, const std::string &what,
                                       size_t techniques) {
  std::vector<TcProbRecord> records;
  ForEachJsonLine(in, what, [&](const json &rec, size_t line) {
    TcProbRecord r;
    const json &id = RequireField(rec, "article_id", what, line);
    if (!id.is_string()) throw FormatError(Located(what, line, "article_id must be a string"));
    r.article_id = id.get<std::string>();
    const json &span = RequireField(rec, "span", what, line);
    if (!span.is_array() || span.size() != 2) {
      throw FormatError(Located(what, line, "span must be a [start,end] pair"));
    }
    r.span = {RequireOffset(span[0], what, line), RequireOffset(span[1], what, line)};
    if (r.span.end <= r.span.start) {
      throw FormatError(Located(what, line, "span end must exceed start"));
    }
    r.row_ordinal = RequireOffset(RequireField(rec, "row_ordinal", what, line), what, line);
    const json &probs = RequireField(rec, "probs", what, line);
    if (!probs.is_array() || probs.size() != techniques) {
      throw FormatError(Located(what, line,
                                "probs must have " + std::to_string(techniques) + " entries"));
    }
    for (const json &p : probs) {
      const double v = RequireFinite(p, what, line);
      if (v < 0.0) throw FormatError(Located(what, line, "negative probability"));
      r.probs.push_back(v);
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<TcProbRecord> ReadTcProbs(const std::string &path, size_t techniques) {
  std::ifstream in = OpenInput(path);
  return ParseTcProbs(in, path, techniques);
}

void WriteTcProbs(std::ostream &out, std::span<const TcProbRecord> records) {
  for (const TcProbRecord &r : records) {
    json rec;
    rec["article_id"] = r.article_id;
    rec["span"] = {r.span.start, r.span.end};
    rec["row_ordinal"] = r.row_ordinal;
    rec["probs"] = r.probs;
    out << rec.dump() << '\n';
  }
}

void SaveTcProbs(const std::string &path, std::span<const TcProbRecord> records) {
  std::ofstream out = OpenOutput(path);
  WriteTcProbs(out, records);
  if (!out) throw IoError("error writing " + path);
}

std::vector<std::vector<double>> AlignTcProbs(std::span<const TcRow> rows,
                                              std::span<const TcProbRecord> records,
                                              const std::string &what) {
  std::vector<std::vector<double>> aligned(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const TcProbRecord &r : records) {
    if (r.row_ordinal >= rows.size()) {
      throw FormatError(what + ": row_ordinal " + std::to_string(r.row_ordinal) +
                        " beyond the " + std::to_string(rows.size()) + " input rows");
    }
    const TcRow &row = rows[r.row_ordinal];
    if (seen[r.row_ordinal]) {
      throw FormatError(what + ": duplicate row_ordinal " + std::to_string(r.row_ordinal));
    }
    if (row.article_id != r.article_id || row.span != r.span) {
      throw FormatError(what + ": row_ordinal " + std::to_string(r.row_ordinal) +
                        " does not match the article/span of that input row");
    }
    seen[r.row_ordinal] = true;
    aligned[r.row_ordinal] = r.probs;
  }
  for (size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw FormatError(what + ": no probabilities for row_ordinal " + std::to_string(i));
    }
  }
  return aligned;
}

// --- instances ---------------------------------------------------------------

std::vector<TechniqueInstance> BuildInstances(std::span<const TcRow> rows,
                                              std::span<const std::vector<double>> row_scores,
                                              std::span<const Article> articles,
                                              const StopwordList &stopwords) {
  if (row_scores.size() != rows.size()) {
    throw ContractViolation("BuildInstances: one score vector per row required");
  }
  ArticleIndex index(articles);
  std::vector<TechniqueInstance> instances;
  std::map<std::pair<std::string, CharSpan>, size_t> group_of;
  for (size_t i = 0; i < rows.size(); ++i) {
    const TcRow &row = rows[i];
    auto [it, inserted] = group_of.emplace(std::make_pair(row.article_id, row.span),
                                           instances.size());
    if (inserted) {
      const Article &article = index.Get(row.article_id);
      TechniqueInstance inst;
      inst.group = instances.size();
      inst.article_id = row.article_id;
      inst.span = row.span;
      inst.span_text = article.Slice(row.span);
      inst.key = MakeSpanKey(std::u32string_view(article.text).substr(row.span.start,
                                                                       row.span.length()),
                             stopwords);
      inst.scores.assign(row_scores[i].size(), 0.0);
      instances.push_back(std::move(inst));
    }
    TechniqueInstance &inst = instances[it->second];
    if (row_scores[i].size() != inst.scores.size()) {
      throw ContractViolation("BuildInstances: score width differs at row " +
                              std::to_string(row.ordinal));
    }
    inst.row_ordinals.push_back(row.ordinal);
    for (size_t k = 0; k < inst.scores.size(); ++k) inst.scores[k] += row_scores[i][k];
  }
  for (TechniqueInstance &inst : instances) {
    const double n = static_cast<double>(inst.row_ordinals.size());
    for (double &s : inst.scores) s /= n;
    std::sort(inst.row_ordinals.begin(), inst.row_ordinals.end());
  }
  return instances;
}

// --- configuration -----------------------------------------------------------

void TcRuleConfig::Validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(rep_single_match_threshold) || !unit(rep_zero_match_keep_threshold)) {
    throw ConfigError("repetition thresholds must lie in [0, 1]");
  }
  if (!(seen_span_bonus >= 0.0)) throw ConfigError("seen-span bonus must be >= 0");
  if (!(subspan_max_drop_factor > 1.0)) {
    throw ConfigError("subspan drop factor must exceed 1");
  }
  if (rep_min_other_matches < 2) {
    throw ConfigError("repetition minimum match count must be at least 2");
  }
}

// --- memory and nesting tables ---------------------------------------------

TrainingSpanMemory TrainingSpanMemory::Build(std::span<const TcRow> labeled_rows,
                                             std::span<const Article> articles,
                                             const StopwordList &stopwords) {
  ArticleIndex index(articles);
  TrainingSpanMemory memory;
  for (const TcRow &row : labeled_rows) {
    if (!row.technique) continue;
    const Article &article = index.Get(row.article_id);
    const SpanKey key = MakeSpanKey(
        std::u32string_view(article.text).substr(row.span.start, row.span.length()),
        stopwords);
    if (!key.empty()) memory.Add(key, *row.technique);
  }
  return memory;
}

void TrainingSpanMemory::Add(const SpanKey &key, TechniqueId technique) {
  if (key.empty()) throw ContractViolation("TrainingSpanMemory: empty key");
  entries_[key].insert(technique);
}

const std::set<TechniqueId> *TrainingSpanMemory::Find(const SpanKey &key) const {
  if (key.empty()) return nullptr;
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void TrainingSpanMemory::Write(std::ostream &out, const TechniqueSet &techniques) const {
  for (const auto &[key, set] : entries_) {
    for (TechniqueId t : set) out << key.canonical << '\t' << techniques.name(t) << '\n';
  }
}

TrainingSpanMemory TrainingSpanMemory::Read(std::istream &in, const std::string &what,
                                            const TechniqueSet &techniques) {
  TrainingSpanMemory memory;
  std::string line;
  for (size_t number = 1; std::getline(in, line); ++number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 2 || fields[0].empty()) {
      throw FormatError(Located(what, number, "expected key \\t technique"));
    }
    memory.Add(SpanKey{fields[0]}, RequireTechnique(techniques, fields[1], what, number));
  }
  return memory;
}

void TrainingSpanMemory::Save(const std::string &path, const TechniqueSet &techniques) const {
  std::ofstream out = OpenOutput(path);
  Write(out, techniques);
  if (!out) throw IoError("error writing " + path);
}

TrainingSpanMemory TrainingSpanMemory::Load(const std::string &path,
                                            const TechniqueSet &techniques) {
  std::ifstream in = OpenInput(path);
  return Read(in, path, techniques);
}

NestingTable NestingTable::Build(std::span<const TcRow> labeled_rows) {
  NestingTable table;
  for (const auto &[article, spans] : GroupLabeledSpans(labeled_rows)) {
    for (const LabeledSpan &outer : spans) {
      for (const LabeledSpan &inner : spans) {
        if (outer.span.StrictlyContains(inner.span)) {
          table.Add(outer.technique, inner.technique);
        }
      }
    }
  }
  return table;
}

void NestingTable::Write(std::ostream &out, const TechniqueSet &techniques) const {
  for (const auto &[outer, inner] : pairs_) {
    out << techniques.name(outer) << '\t' << techniques.name(inner) << '\n';
  }
}

NestingTable NestingTable::Read(std::istream &in, const std::string &what,
                                const TechniqueSet &techniques) {
  NestingTable table;
  std::string line;
  for (size_t number = 1; std::getline(in, line); ++number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 2) throw FormatError(Located(what, number, "expected outer \\t inner"));
    table.Add(RequireTechnique(techniques, fields[0], what, number),
              RequireTechnique(techniques, fields[1], what, number));
  }
  return table;
}

void NestingTable::Save(const std::string &path, const TechniqueSet &techniques) const {
  std::ofstream out = OpenOutput(path);
  Write(out, techniques);
  if (!out) throw IoError("error writing " + path);
}

NestingTable NestingTable::Load(const std::string &path, const TechniqueSet &techniques) {
  std::ifstream in = OpenInput(path);
  return Read(in, path, techniques);
}

// --- rules -------------------------------------------------------------------

TechniqueId ArgmaxTechnique(std::span<const double> scores) {
  if (scores.empty()) throw ContractViolation("ArgmaxTechnique: empty score vector");
  size_t best = 0;
  for (size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return static_cast<TechniqueId>(best);
}

void ApplySeenSpanBonus(TechniqueInstance &instance, const TrainingSpanMemory &memory,
                        const TcRuleConfig &config) {
  const std::set<TechniqueId> *seen = memory.Find(instance.key);
  if (seen == nullptr) return;
  for (TechniqueId t : *seen) {
    if (static_cast<size_t>(t) >= instance.scores.size()) {
      throw ContractViolation("seen-span memory references technique beyond score width");
    }
    instance.scores[t] += config.seen_span_bonus;
  }
}

void ApplyRepetitionRule(std::span<TechniqueInstance> article_instances,
                         TechniqueId repetition, const TcRuleConfig &config) {
  const size_t n = article_instances.size();
  std::vector<size_t> matches(n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (article_instances[i].key.empty()) continue;
    for (size_t j = 0; j < n; ++j) {
      if (j != i && article_instances[j].key == article_instances[i].key) ++matches[i];
    }
  }
  for (size_t i = 0; i < n; ++i) {
    TechniqueInstance &inst = article_instances[i];
    if (inst.key.empty()) continue;
    double &rep = inst.scores.at(repetition);
    bool force = false;
    if (matches[i] >= config.rep_min_other_matches) {
      force = true;
    } else if (matches[i] >= 1) {
      force = rep > config.rep_single_match_threshold;
    } else if (rep < config.rep_zero_match_keep_threshold) {
      rep = 0.0;
    }
    if (force) rep = MaxScore(inst.scores) + 1.0;
  }
}

void ApplySubspanConsistency(std::span<TechniqueInstance> article_instances,
                             const NestingTable &nesting, const TcRuleConfig &config) {
  for (TechniqueInstance &outer : article_instances) {
    for (TechniqueInstance &inner : article_instances) {
      if (!outer.span.StrictlyContains(inner.span)) continue;
      const TechniqueId outer_label = ArgmaxTechnique(outer.scores);
      const TechniqueId inner_label = ArgmaxTechnique(inner.scores);
      if (nesting.Contains(outer_label, inner_label)) continue;
      // Ties go to the subspan.
      const bool outer_loses = outer.scores[outer_label] < inner.scores[inner_label];
      TechniqueInstance &victim = outer_loses ? outer : inner;
      const TechniqueId label = outer_loses ? outer_label : inner_label;
      const double old_max = victim.scores[label];
      if (old_max <= 0.0) continue;
      double new_max = 0.0;
      for (size_t k = 0; k < victim.scores.size(); ++k) {
        if (k != static_cast<size_t>(label)) new_max = std::max(new_max, victim.scores[k]);
      }
      if (new_max * config.subspan_max_drop_factor >= old_max) {
        victim.scores[label] = 0.0;
      }
    }
  }
}

std::vector<TechniqueId> AssignMultilabel(std::span<const double> scores, size_t n) {
  if (n == 0 || n > scores.size()) {
    throw ContractViolation("AssignMultilabel: n=" + std::to_string(n) + " with " +
                            std::to_string(scores.size()) + " techniques");
  }
  std::vector<TechniqueId> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](TechniqueId a, TechniqueId b) { return scores[a] > scores[b]; });
  order.resize(n);
  return order;
}

// --- cascade -----------------------------------------------------------------

std::vector<TechniqueId> RunCascade(const TcCascadeInputs &inputs,
                                    const TcRuleConfig &config, size_t workers) {
  config.Validate();
  const TcStages &stages = config.stages;
  if (inputs.techniques == nullptr || inputs.stopwords == nullptr) {
    throw ContractViolation("RunCascade: technique set and stopwords required");
  }
  if (inputs.members.empty()) throw ConfigError("no member probability files given");
  const size_t rows = inputs.rows.size();
  const size_t width = inputs.techniques->size();
  for (size_t i = 0; i < rows; ++i) {
    if (inputs.rows[i].ordinal != i) {
      throw ContractViolation("RunCascade: row ordinals must equal row positions");
    }
  }
  for (const auto &member : inputs.members) {
    if (member.size() != rows) {
      throw ContractViolation("RunCascade: member probability table is not row-aligned");
    }
  }
  std::optional<TechniqueId> repetition;
  if (stages.repetition) {
    repetition = inputs.techniques->Find(kRepetitionTechnique);
    if (!repetition) {
      throw ConfigError("the repetition stage needs a '" + std::string(kRepetitionTechnique) +
                        "' entry in the technique set");
    }
  }
  if (stages.bonus && inputs.memory == nullptr) {
    throw ConfigError("the seen-span bonus stage needs a span memory (build-memory)");
  }
  if (stages.subspan && inputs.nesting == nullptr) {
    throw ConfigError("the subspan stage needs a nesting table (build-nesting)");
  }

  // (1) ensemble
  std::vector<std::vector<double>> row_scores;
  const bool stack = stages.ensemble && inputs.members.size() > 1;
  if (stack) {
    if (inputs.stacker == nullptr) {
      throw ConfigError("ensembling several members needs a stacker model (train-stacker)");
    }
    if (inputs.stacker->members != inputs.members.size() ||
        inputs.stacker->techniques != width) {
      throw ConfigError("stacker model shape does not match the member files");
    }
    row_scores.resize(rows);
    std::vector<std::vector<double>> member_probs(inputs.members.size());
    for (size_t r = 0; r < rows; ++r) {
      for (size_t m = 0; m < inputs.members.size(); ++m) member_probs[m] = inputs.members[m][r];
      row_scores[r] = StackPredict(member_probs, *inputs.stacker);
    }
  } else {
    const size_t primary = stages.primary_member.value_or(inputs.members.size() - 1);
    if (primary >= inputs.members.size()) {
      throw ConfigError("primary member index " + std::to_string(primary) + " out of range");
    }
    row_scores = inputs.members[primary];
  }
  for (const auto &v : row_scores) {
    if (v.size() != width) {
      throw ContractViolation("RunCascade: probability width differs from technique count");
    }
  }

  std::vector<TechniqueInstance> instances =
      BuildInstances(inputs.rows, row_scores, inputs.articles, *inputs.stopwords);

  // Articles in order of first appearance; each worker owns whole articles.
  std::vector<std::vector<size_t>> by_article;
  std::map<std::string, size_t> article_slot;
  for (size_t i = 0; i < instances.size(); ++i) {
    auto [it, inserted] = article_slot.emplace(instances[i].article_id, by_article.size());
    if (inserted) by_article.emplace_back();
    by_article[it->second].push_back(i);
  }

  std::vector<TechniqueId> labels(rows, 0);
  ParallelFor(by_article.size(), workers, [&](size_t a) {
    std::vector<TechniqueInstance> local;
    local.reserve(by_article[a].size());
    for (size_t i : by_article[a]) local.push_back(instances[i]);
    if (stages.bonus) {
      for (TechniqueInstance &inst : local) ApplySeenSpanBonus(inst, *inputs.memory, config);
    }
    if (stages.repetition) ApplyRepetitionRule(local, *repetition, config);
    if (stages.subspan) ApplySubspanConsistency(local, *inputs.nesting, config);
    for (const TechniqueInstance &inst : local) {
      std::vector<TechniqueId> assigned;
      if (stages.multilabel) {
        assigned = AssignMultilabel(inst.scores, inst.multiplicity());
      } else {
        assigned.assign(inst.multiplicity(), ArgmaxTechnique(inst.scores));
      }
      for (size_t k = 0; k < inst.row_ordinals.size(); ++k) {
        labels[inst.row_ordinals[k]] = assigned[k];
      }
    }
  });
  return labels;
}

}  // namespace propspan
