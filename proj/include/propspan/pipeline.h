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

#ifndef PROPSPAN_PIPELINE_H_
#define PROPSPAN_PIPELINE_H_

#include <span>
#include <string>
#include <vector>

#include "propspan/corpus.h"
#include "propspan/crf.h"
#include "propspan/emissions.h"
#include "propspan/span_post.h"
#include "propspan/tc_rules.h"

namespace propspan {

// SI decoding over a corpus. `members` holds one emission file per ensemble
// member; `params` holds one CRF per member, or a single CRF shared by all.
// With `ensemble` off only the first member is decoded. Members are decoded
// without post-processing, their spans unioned, then post-processed once.
struct SiPipelineConfig {
  SiStages stages;
  bool ensemble = true;
  size_t workers = 1;
};

SiLabels PredictSi(std::span<const Article> articles,
                   std::span<const std::vector<EmissionRecord>> members,
                   std::span<const CrfParams> params, const SiPipelineConfig &config);

// Cumulative configurations behind each SI ablation row, in row order.
std::vector<SiPipelineConfig> SiAblationConfigs(const SiPipelineConfig &base);

// Cumulative configurations behind each TC ablation row, in row order.
// Thresholds are taken from `base`.
std::vector<TcRuleConfig> TcAblationConfigs(const TcRuleConfig &base);

// Copies `rows` with the given labels filled in.
std::vector<TcRow> LabelRows(std::span<const TcRow> rows,
                             std::span<const TechniqueId> labels);

}  // namespace propspan

#endif  // PROPSPAN_PIPELINE_H_
