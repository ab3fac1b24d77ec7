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

#include <random>

#include "doctest.h"
#include "propspan/emissions.h"
#include "propspan/errors.h"
#include "propspan/pipeline.h"
#include "propspan/synth.h"
#include "test_support.h"

namespace propspan {
namespace {

struct SiFixture {
  SynthSiCorpus corpus = GenerateSiCorpus(12, 3);
  std::vector<std::vector<EmissionRecord>> members;
  std::vector<CrfParams> params;

  SiFixture() {
    FeatureScorerTrainConfig cfg;
    cfg.epochs = 60;
    const auto tagged = BuildTaggedCorpus(corpus.articles, corpus.gold);
    for (uint64_t seed : {1, 2}) {
      cfg.seed = seed;
      members.push_back(EmitCorpus(TrainFeatureScorer(tagged, cfg), corpus.articles));
    }
    std::mt19937_64 rng(8);
    params.push_back(testing::RandomCrfParams(rng, CrfMask::Bio(), 0.5));
  }
};

TEST_SUITE("pipeline") {

TEST_CASE("synthetic si corpus is well formed and seeded") {
  const SynthSiCorpus a = GenerateSiCorpus(20, 5);
  const SynthSiCorpus b = GenerateSiCorpus(20, 5);
  REQUIRE(a.articles.size() == 20);
  CHECK(a.gold == b.gold);
  CHECK(GenerateSiCorpus(20, 6).gold != a.gold);
  ArticleIndex index(a.articles);
  size_t spans = 0;
  for (const auto &[id, list] : a.gold) {
    const Article &article = index.Get(id);
    for (size_t i = 0; i < list.size(); ++i) {
      CHECK(list[i].end <= article.length());
      CHECK(list[i].start < list[i].end);
      if (i > 0) CHECK(list[i - 1].end <= list[i].start);
      ++spans;
    }
  }
  CHECK(spans > 20);
}

TEST_CASE("synthetic tc data aligns members with rows") {
  const SynthTcData data = GenerateTcData(6, 4, StopwordList::Default());
  CHECK(data.techniques.Find("Repetition").has_value());
  CHECK_FALSE(data.train.rows.empty());
  for (const SynthTcSplit *split : {&data.dev, &data.test}) {
    REQUIRE(split->members.size() == 2);
    for (const auto &member : split->members) {
      REQUIRE(member.size() == split->rows.size());
      for (const auto &p : member) CHECK(p.size() == data.techniques.size());
    }
    for (size_t i = 0; i < split->rows.size(); ++i) {
      CHECK(split->rows[i].ordinal == i);
      CHECK(split->rows[i].technique.has_value());
    }
  }
}

TEST_CASE("si prediction is independent of the worker count") {
  SiFixture f;
  SiPipelineConfig cfg;
  const SiLabels one = PredictSi(f.corpus.articles, f.members, f.params, cfg);
  cfg.workers = 4;
  CHECK(PredictSi(f.corpus.articles, f.members, f.params, cfg) == one);
  CHECK_FALSE(one.empty());
  ArticleIndex index(f.corpus.articles);
  for (const auto &[id, spans] : one) {
    for (size_t i = 0; i < spans.size(); ++i) {
      CHECK(spans[i].end <= index.Get(id).length());
      if (i > 0) CHECK(spans[i - 1].end <= spans[i].start);
    }
  }
}

TEST_CASE("si prediction input checks") {
  SiFixture f;
  SiPipelineConfig cfg;
  std::vector<CrfParams> three(3, f.params[0]);
  CHECK_THROWS_AS(PredictSi(f.corpus.articles, f.members, three, cfg), ConfigError);
  CHECK_THROWS_AS(PredictSi(f.corpus.articles, {}, f.params, cfg), ConfigError);
  auto short_members = f.members;
  short_members[1].pop_back();
  CHECK_THROWS_AS(PredictSi(f.corpus.articles, short_members, f.params, cfg), FormatError);
}

TEST_CASE("ablation configurations are cumulative") {
  const auto si = SiAblationConfigs({});
  REQUIRE(si.size() == 4);
  CHECK_FALSE(si[0].stages.crf);
  CHECK_FALSE(si[0].ensemble);
  CHECK(si[1].stages.crf);
  CHECK(si[2].ensemble);
  CHECK(si[3].stages.trim);
  CHECK(si[3].stages.quotes);
  const auto tc = TcAblationConfigs({});
  REQUIRE(tc.size() == 7);
  CHECK(tc[0].stages.primary_member == 0u);
  CHECK_FALSE(tc[1].stages.primary_member.has_value());
  CHECK(tc[2].stages.multilabel);
  CHECK(tc[3].stages.bonus);
  CHECK(tc[4].stages.repetition);
  CHECK(tc[5].stages.subspan);
  CHECK_FALSE(tc[5].stages.ensemble);
  CHECK(tc[6].stages.ensemble);
}

TEST_CASE("label rows") {
  std::vector<TcRow> rows(2);
  const std::vector<TechniqueId> labels = {3, 1};
  const auto out = LabelRows(rows, labels);
  CHECK(out[0].technique == 3);
  CHECK(out[1].technique == 1);
  CHECK_THROWS_AS(LabelRows(rows, std::span(labels).first(1)), ContractViolation);
}

}  // TEST_SUITE

}  // namespace
}  // namespace propspan
