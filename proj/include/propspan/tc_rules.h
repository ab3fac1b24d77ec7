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

#ifndef PROPSPAN_TC_RULES_H_
#define PROPSPAN_TC_RULES_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "propspan/corpus.h"
#include "propspan/stacker.h"
#include "propspan/textnorm.h"

namespace propspan {

// ---------------------------------------------------------------------------
// TC probability files. One JSON object per line:
//   {"article_id": "111", "span": [10, 20], "row_ordinal": 0, "probs": [...]}
// probs follow technique-set order.

struct TcProbRecord {
  std::string article_id;
  CharSpan span;
  size_t row_ordinal = 0;
  std::vector<double> probs;

  bool operator==(const TcProbRecord &) const = default;
};

std::vector<TcProbRecord> ReadTcProbs(const std::string &path, size_t techniques);
std::vector<TcProbRecord> ParseTcProbs(std::istream &in, const std::string &what,
                                       size_t techniques);
void WriteTcProbs(std::ostream &out, std::span<const TcProbRecord> records);
void SaveTcProbs(const std::string &path, std::span<const TcProbRecord> records);

// Orders records by row ordinal, checking they cover the rows exactly once
// with matching article and span. Throws FormatError otherwise.
std::vector<std::vector<double>> AlignTcProbs(std::span<const TcRow> rows,
                                              std::span<const TcProbRecord> records,
                                              const std::string &what);

// ---------------------------------------------------------------------------

// One multiplicity group: the identical (article, span) rows of a TC file,
// sharing one score vector. Scores are probabilities on input and become
// general non-negative scores once a rule fires.
struct TechniqueInstance {
  size_t group = 0;
  std::string article_id;
  CharSpan span;
  std::string span_text;
  SpanKey key;
  std::vector<size_t> row_ordinals;  // ascending
  std::vector<double> scores;

  size_t multiplicity() const { return row_ordinals.size(); }
};

// Groups rows by (article, span) in order of first appearance and averages
// the per-row score vectors within each group.
std::vector<TechniqueInstance> BuildInstances(std::span<const TcRow> rows,
                                              std::span<const std::vector<double>> row_scores,
                                              std::span<const Article> articles,
                                              const StopwordList &stopwords);

struct TcStages {
  bool ensemble = true;    // stacker combination of member probabilities
  bool bonus = true;       // seen-span bonus
  bool repetition = true;  // Repetition rule
  bool subspan = true;     // span/subspan consistency
  bool multilabel = true;  // top-n assignment for multiplicity groups
  // Member used when the ensemble stage is off; defaults to the last one.
  std::optional<size_t> primary_member;
};

struct TcRuleConfig {
  size_t rep_min_other_matches = 2;
  double rep_single_match_threshold = 0.001;
  double rep_zero_match_keep_threshold = 0.99;
  double seen_span_bonus = 0.5;
  double subspan_max_drop_factor = 2.0;
  TcStages stages;

  // Throws ConfigError when thresholds are out of range.
  void Validate() const;
};

// Technique sets each training span key has been annotated with.
class TrainingSpanMemory {
 public:
  TrainingSpanMemory() = default;

  // Labeled training rows; spans whose key is empty are skipped.
  static TrainingSpanMemory Build(std::span<const TcRow> labeled_rows,
                                  std::span<const Article> articles,
                                  const StopwordList &stopwords);

  void Add(const SpanKey &key, TechniqueId technique);
  const std::set<TechniqueId> *Find(const SpanKey &key) const;
  size_t size() const { return entries_.size(); }

  // TSV, one (key, technique) pair per line, sorted.
  void Write(std::ostream &out, const TechniqueSet &techniques) const;
  static TrainingSpanMemory Read(std::istream &in, const std::string &what,
                                 const TechniqueSet &techniques);
  void Save(const std::string &path, const TechniqueSet &techniques) const;
  static TrainingSpanMemory Load(const std::string &path, const TechniqueSet &techniques);

  bool operator==(const TrainingSpanMemory &) const = default;

 private:
  std::map<SpanKey, std::set<TechniqueId>> entries_;
};

// Ordered (outer, inner) technique pairs where a training span strictly
// contains another span of the same article.
class NestingTable {
 public:
  NestingTable() = default;

  static NestingTable Build(std::span<const TcRow> labeled_rows);

  void Add(TechniqueId outer, TechniqueId inner) { pairs_.insert({outer, inner}); }
  bool Contains(TechniqueId outer, TechniqueId inner) const {
    return pairs_.count({outer, inner}) > 0;
  }
  size_t size() const { return pairs_.size(); }

  // TSV: outer \t inner, sorted.
  void Write(std::ostream &out, const TechniqueSet &techniques) const;
  static NestingTable Read(std::istream &in, const std::string &what,
                           const TechniqueSet &techniques);
  void Save(const std::string &path, const TechniqueSet &techniques) const;
  static NestingTable Load(const std::string &path, const TechniqueSet &techniques);

  bool operator==(const NestingTable &) const = default;

 private:
  std::set<std::pair<TechniqueId, TechniqueId>> pairs_;
};

// Index of the largest score; ties go to the lower technique index.
TechniqueId ArgmaxTechnique(std::span<const double> scores);

// Adds the bonus to every technique the instance's key was seen with.
void ApplySeenSpanBonus(TechniqueInstance &instance, const TrainingSpanMemory &memory,
                        const TcRuleConfig &config);

// Repetition handling for the instances of one article. For an instance
// with a non-empty key, m counts the other instances sharing its key:
//   m >= 2          Repetition forced (its score set to max + 1)
//   m == 1          forced only if P(Repetition) > 0.001
//   m == 0          P(Repetition) set to 0 unless it is >= 0.99
// Instances with an empty key are left alone.
void ApplyRepetitionRule(std::span<TechniqueInstance> article_instances,
                         TechniqueId repetition, const TcRuleConfig &config);

// For each (outer, inner) pair with inner strictly inside outer whose
// current labels form an unseen nesting, the instance with the smaller
// winning score loses that score (set to 0.0), unless its maximum would
// then fall below old_max / subspan_max_drop_factor. Pairs are visited
// outer-major in instance order, and labels are re-read before each pair.
void ApplySubspanConsistency(std::span<TechniqueInstance> article_instances,
                             const NestingTable &nesting, const TcRuleConfig &config);

// The n highest-scoring distinct techniques, ties to the lower index.
std::vector<TechniqueId> AssignMultilabel(std::span<const double> scores, size_t n);

struct TcCascadeInputs {
  std::span<const TcRow> rows;
  // members[m][ordinal]: probability vector of member m for that row.
  std::span<const std::vector<std::vector<double>>> members;
  std::span<const Article> articles;
  const StopwordList *stopwords = nullptr;
  const TechniqueSet *techniques = nullptr;
  const TrainingSpanMemory *memory = nullptr;  // required when bonus is on
  const NestingTable *nesting = nullptr;       // required when subspan is on
  const StackerModel *stacker = nullptr;       // required for ensembling > 1 member
};

// Runs the stages in fixed order: ensemble -> bonus -> repetition ->
// subspan -> multiplicity assignment, each toggled by config.stages.
// Returns one technique per row, indexed by ordinal. Articles are processed
// on up to `workers` threads; output does not depend on the worker count.
std::vector<TechniqueId> RunCascade(const TcCascadeInputs &inputs,
                                    const TcRuleConfig &config, size_t workers = 1);

}  // namespace propspan

#endif  // PROPSPAN_TC_RULES_H_
