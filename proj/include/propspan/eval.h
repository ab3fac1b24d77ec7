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

#ifndef PROPSPAN_EVAL_H_
#define PROPSPAN_EVAL_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "propspan/corpus.h"

namespace propspan {

// Character-overlap credit for span identification:
//   P = (1/|S|) sum_{s in S} sum_{t in T} |s n t| / |s|
//   R = (1/|T|) sum_{t in T} sum_{s in S} |s n t| / |t|
// with sums restricted to spans of the same article. Per-span credit is not
// capped. With no predictions P = 1 if there is no gold either, else 0;
// recall mirrors this.
struct SiScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t predicted_spans = 0;
  size_t gold_spans = 0;
};

struct SiScoreOptions {
  // Coalesce overlapping gold spans before scoring.
  bool merge_gold = false;
};

// When `articles` is non-empty every span is checked against its article
// length (ContractViolation otherwise).
SiScore ScoreSi(const SiLabels &predicted, const SiLabels &gold,
                std::span<const Article> articles = {}, const SiScoreOptions &options = {});

struct TechniqueCounts {
  size_t gold = 0;
  size_t predicted = 0;
  size_t correct = 0;
};

struct TcScore {
  double micro_f1 = 0.0;
  size_t matches = 0;
  size_t total = 0;
  std::map<TechniqueId, TechniqueCounts> per_technique;
};

// Rows are aligned by ordinal and must agree on article and span. Within a
// multiplicity group predicted and gold labels are matched as multisets, so
// order inside a group does not matter. With equal row counts precision and
// recall coincide and micro F1 is the share of matched rows.
TcScore ScoreTc(std::span<const TcRow> predicted, std::span<const TcRow> gold);

struct AblationRow {
  std::string stage;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline AblationRow MakeAblationRow(std::string stage, const SiScore &s) {
  return {std::move(stage), s.precision, s.recall, s.f1};
}
inline AblationRow MakeAblationRow(std::string stage, const TcScore &s) {
  return {std::move(stage), s.micro_f1, s.micro_f1, s.micro_f1};
}

// Stage labels in report order.
const std::vector<std::string> &SiAblationStages();
const std::vector<std::string> &TcAblationStages();

// stage \t precision \t recall \t f1 with a header line.
std::string FormatAblationTsv(std::span<const AblationRow> rows);
// Aligned plain-text table.
std::string FormatAblationTable(std::span<const AblationRow> rows);

}  // namespace propspan

#endif  // PROPSPAN_EVAL_H_
