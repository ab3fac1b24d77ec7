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

#include "propspan/eval.h"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <optional>
#include <sstream>

#include "propspan/errors.h"

namespace propspan {

namespace {

void CheckSpans(const SiLabels &labels, const ArticleIndex *index, const char *side) {
  for (const auto &[id, spans] : labels) {
    const Article *article = index ? index->Find(id) : nullptr;
    if (index && article == nullptr) {
      throw ContractViolation(std::string(side) + " spans reference unknown article " + id);
    }
    for (const CharSpan &s : spans) {
      if (s.end <= s.start || (article && s.end > article->length())) {
        throw ContractViolation(std::string(side) + " span (" + std::to_string(s.start) +
                                "," + std::to_string(s.end) + ") invalid for article " + id);
      }
    }
  }
}

// sum over a in A of sum over b in B of |a n b| / |a|
double OverlapCredit(std::span<const CharSpan> a, std::span<const CharSpan> b) {
  double credit = 0.0;
  for (const CharSpan &x : a) {
    size_t covered = 0;
    for (const CharSpan &y : b) covered += x.Overlap(y);
    credit += static_cast<double>(covered) / static_cast<double>(x.length());
  }
  return credit;
}

size_t CountSpans(const SiLabels &labels) {
  size_t n = 0;
  for (const auto &[id, spans] : labels) n += spans.size();
  return n;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

SiScore ScoreSi(const SiLabels &predicted, const SiLabels &gold,
                std::span<const Article> articles, const SiScoreOptions &options) {
  std::optional<ArticleIndex> index;
  if (!articles.empty()) index.emplace(articles);
  CheckSpans(predicted, index ? &*index : nullptr, "predicted");
  CheckSpans(gold, index ? &*index : nullptr, "gold");

  SiLabels gold_used = gold;
  if (options.merge_gold) {
    for (auto &[id, spans] : gold_used) spans = MergeOverlapping(spans);
  }
  SiScore score;
  score.predicted_spans = CountSpans(predicted);
  score.gold_spans = CountSpans(gold_used);

  double p_credit = 0.0, r_credit = 0.0;
  const std::vector<CharSpan> none;
  for (const auto &[id, spans] : predicted) {
    auto it = gold_used.find(id);
    p_credit += OverlapCredit(spans, it == gold_used.end() ? none : it->second);
  }
  for (const auto &[id, spans] : gold_used) {
    auto it = predicted.find(id);
    r_credit += OverlapCredit(spans, it == predicted.end() ? none : it->second);
  }
  const size_t s = score.predicted_spans, t = score.gold_spans;
  score.precision = s == 0 ? (t == 0 ? 1.0 : 0.0) : p_credit / static_cast<double>(s);
  score.recall = t == 0 ? (s == 0 ? 1.0 : 0.0) : r_credit / static_cast<double>(t);
  const double pr = score.precision + score.recall;
  score.f1 = pr > 0.0 ? 2.0 * score.precision * score.recall / pr : 0.0;
  return score;
}

TcScore ScoreTc(std::span<const TcRow> predicted, std::span<const TcRow> gold) {
  if (predicted.size() != gold.size()) {
    throw ContractViolation("ScoreTc: " + std::to_string(predicted.size()) +
                            " predicted rows vs " + std::to_string(gold.size()) + " gold rows");
  }
  std::vector<const TcRow *> pred_by_ordinal(predicted.size(), nullptr);
  for (const TcRow &r : predicted) {
    if (r.ordinal >= predicted.size() || pred_by_ordinal[r.ordinal] != nullptr) {
      throw ContractViolation("ScoreTc: bad or duplicate predicted ordinal " +
                              std::to_string(r.ordinal));
    }
    pred_by_ordinal[r.ordinal] = &r;
  }
  using GroupKey = std::pair<std::string, CharSpan>;
  std::map<GroupKey, std::pair<std::vector<TechniqueId>, std::vector<TechniqueId>>> groups;
  TcScore score;
  for (const TcRow &g : gold) {
    if (g.ordinal >= pred_by_ordinal.size()) {
      throw ContractViolation("ScoreTc: gold ordinal out of range");
    }
    const TcRow &p = *pred_by_ordinal[g.ordinal];
    if (p.article_id != g.article_id || p.span != g.span) {
      throw ContractViolation("ScoreTc: rows disagree on article/span at ordinal " +
                              std::to_string(g.ordinal));
    }
    if (!g.technique || !p.technique) {
      throw ContractViolation("ScoreTc: unlabeled row at ordinal " + std::to_string(g.ordinal));
    }
    auto &[pred_labels, gold_labels] = groups[{g.article_id, g.span}];
    pred_labels.push_back(*p.technique);
    gold_labels.push_back(*g.technique);
    ++score.per_technique[*g.technique].gold;
    ++score.per_technique[*p.technique].predicted;
  }
  for (auto &[key, labels] : groups) {
    auto &[pred_labels, gold_labels] = labels;
    std::sort(pred_labels.begin(), pred_labels.end());
    std::sort(gold_labels.begin(), gold_labels.end());
    std::vector<TechniqueId> common;
    std::set_intersection(pred_labels.begin(), pred_labels.end(), gold_labels.begin(),
                          gold_labels.end(), std::back_inserter(common));
    for (TechniqueId t : common) ++score.per_technique[t].correct;
    score.matches += common.size();
  }
  score.total = gold.size();
  score.micro_f1 = score.total == 0 ? 0.0
                                    : static_cast<double>(score.matches) /
                                          static_cast<double>(score.total);
  return score;
}

const std::vector<std::string> &SiAblationStages() {
  static const std::vector<std::string> stages = {
      "BIO tagging, per-token argmax",
      "+ CRF layer",
      "+ ensemble",
      "+ post-processing",
  };
  return stages;
}

const std::vector<std::string> &TcAblationStages() {
  static const std::vector<std::string> stages = {
      "first member, argmax",
      "+ second member (span-aware model)",
      "+ post-processing: multi-label correction",
      "+ post-processing: bonus for span labels seen on training",
      "+ post-processing: handling of Repetition",
      "+ post-processing: checking for unseen span-subspan combinations",
      "+ ensemble",
  };
  return stages;
}

std::string FormatAblationTsv(std::span<const AblationRow> rows) {
  std::ostringstream out;
  out << "stage\tprecision\trecall\tf1\n";
  for (const AblationRow &r : rows) {
    out << r.stage << '\t' << Fixed(r.precision) << '\t' << Fixed(r.recall) << '\t'
        << Fixed(r.f1) << '\n';
  }
  return out.str();
}

std::string FormatAblationTable(std::span<const AblationRow> rows) {
  size_t width = 5;
  for (const AblationRow &r : rows) width = std::max(width, r.stage.size());
  std::ostringstream out;
  auto pad = [&](const std::string &s) { return s + std::string(width - s.size(), ' '); };
  out << pad("stage") << "  precision     recall         f1\n";
  out << std::string(width + 33, '-') << '\n';
  for (const AblationRow &r : rows) {
    out << pad(r.stage) << "  " << Fixed(r.precision) << "   " << Fixed(r.recall) << "   "
        << Fixed(r.f1) << '\n';
  }
  return out.str();
}

}  // namespace propspan
