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

#include "propspan/pipeline.h"

#include <unordered_map>

#include "parallel.h"
#include "propspan/errors.h"

namespace propspan {

SiLabels PredictSi(std::span<const Article> articles,
                   std::span<const std::vector<EmissionRecord>> members,
                   std::span<const CrfParams> params, const SiPipelineConfig &config) {
  if (members.empty()) throw ConfigError("no emission files given");
  if (params.empty() && config.stages.crf) throw ConfigError("no CRF parameter files given");
  if (params.size() > 1 && params.size() != members.size()) {
    throw ConfigError("got " + std::to_string(params.size()) + " CRF parameter files for " +
                      std::to_string(members.size()) + " emission files");
  }
  const size_t used = config.ensemble ? members.size() : 1;
  std::vector<std::unordered_map<std::string, const EmissionRecord *>> lookup(used);
  for (size_t m = 0; m < used; ++m) {
    for (const EmissionRecord &r : members[m]) lookup[m][r.article_id] = &r;
  }
  const CrfParams unused_params;
  SiStages raw = config.stages;
  raw.trim = false;
  raw.quotes = false;

  std::vector<SiPrediction> per_article(articles.size());
  ParallelFor(articles.size(), config.workers, [&](size_t a) {
    const Article &article = articles[a];
    std::vector<SiPrediction> decoded;
    for (size_t m = 0; m < used; ++m) {
      auto it = lookup[m].find(article.id);
      if (it == lookup[m].end()) {
        throw FormatError("emission file " + std::to_string(m + 1) +
                          " has no record for article " + article.id);
      }
      const CrfParams &p = params.empty() ? unused_params : params[params.size() > 1 ? m : 0];
      decoded.push_back(DecodeAndPostprocess(article, it->second->scores, p, raw));
    }
    SiPrediction merged = MergeUnion(decoded);
    merged.article_id = article.id;
    merged.spans = PostprocessSpans(merged.spans, article.text, config.stages);
    per_article[a] = std::move(merged);
  });

  SiLabels out;
  for (SiPrediction &p : per_article) {
    if (!p.spans.empty()) out[p.article_id] = std::move(p.spans);
  }
  return out;
}

std::vector<SiPipelineConfig> SiAblationConfigs(const SiPipelineConfig &base) {
  SiPipelineConfig argmax = base;
  argmax.stages.crf = false;
  argmax.stages.trim = false;
  argmax.stages.quotes = false;
  argmax.ensemble = false;
  SiPipelineConfig crf = argmax;
  crf.stages.crf = true;
  SiPipelineConfig ensemble = crf;
  ensemble.ensemble = true;
  SiPipelineConfig full = ensemble;
  full.stages.trim = true;
  full.stages.quotes = true;
  return {argmax, crf, ensemble, full};
}

std::vector<TcRuleConfig> TcAblationConfigs(const TcRuleConfig &base) {
  std::vector<TcRuleConfig> out;
  TcRuleConfig c = base;
  c.stages = TcStages{false, false, false, false, false, 0};
  out.push_back(c);
  c.stages.primary_member.reset();
  out.push_back(c);
  c.stages.multilabel = true;
  out.push_back(c);
  c.stages.bonus = true;
  out.push_back(c);
  c.stages.repetition = true;
  out.push_back(c);
  c.stages.subspan = true;
  out.push_back(c);
  c.stages.ensemble = true;
  out.push_back(c);
  return out;
}

std::vector<TcRow> LabelRows(std::span<const TcRow> rows,
                             std::span<const TechniqueId> labels) {
  if (rows.size() != labels.size()) {
    throw ContractViolation("LabelRows: label count differs from row count");
  }
  std::vector<TcRow> out(rows.begin(), rows.end());
  for (size_t i = 0; i < out.size(); ++i) out[i].technique = labels[i];
  return out;
}

}  // namespace propspan
