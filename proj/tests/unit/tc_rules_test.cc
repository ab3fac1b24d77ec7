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
#include <sstream>

#include "doctest.h"
#include "propspan/errors.h"
#include "propspan/tc_rules.h"
#include "test_support.h"

namespace propspan {
namespace {

// Doubt=0, Loaded_Language=1, Repetition=2, Slogans=3.
constexpr TechniqueId kDoubt = 0, kLoaded = 1, kRep = 2, kSlogans = 3;

TechniqueSet Techniques() {
  return TechniqueSet({"Doubt", "Loaded_Language", "Repetition", "Slogans"});
}

TechniqueInstance Make(std::string key, std::vector<double> scores, CharSpan span = {0, 1}) {
  TechniqueInstance inst;
  inst.key.canonical = std::move(key);
  inst.scores = std::move(scores);
  inst.span = span;
  return inst;
}

TEST_SUITE("tc_rules") {

TEST_CASE("three matching instances are all forced to repetition") {
  std::vector<TechniqueInstance> in = {Make("liar", {0.9, 0.05, 0.0, 0.05}),
                                       Make("liar", {0.2, 0.7, 0.0, 0.1}),
                                       Make("liar", {0.1, 0.1, 0.05, 0.75}),
                                       Make("other", {0.6, 0.2, 0.1, 0.1})};
  ApplyRepetitionRule(in, kRep, {});
  for (int i = 0; i < 3; ++i) CHECK(ArgmaxTechnique(in[i].scores) == kRep);
  CHECK(in[0].scores[kRep] == doctest::Approx(1.9));
  CHECK(in[0].scores[kDoubt] == 0.9);
  CHECK(in[3].scores[kRep] == 0.0);
}

TEST_CASE("single match needs repetition above the threshold") {
  std::vector<TechniqueInstance> in = {Make("liar", {0.6, 0.3995, 0.0005, 0.0}),
                                       Make("liar", {0.6, 0.398, 0.002, 0.0}),
                                       Make("liar b", {0.6, 0.399, 0.001, 0.0}),
                                       Make("liar b", {0.6, 0.399, 0.001, 0.0})};
  ApplyRepetitionRule(in, kRep, {});
  CHECK(ArgmaxTechnique(in[0].scores) == kDoubt);
  CHECK(in[0].scores[kRep] == 0.0005);
  CHECK(ArgmaxTechnique(in[1].scores) == kRep);
  CHECK(ArgmaxTechnique(in[2].scores) == kDoubt);
  CHECK(in[2].scores[kRep] == 0.001);
}

TEST_CASE("unique spans keep repetition only when confident") {
  std::vector<TechniqueInstance> in = {Make("a", {0.0, 0.005, 0.995, 0.0}),
                                       Make("b", {0.3, 0.2, 0.5, 0.0}),
                                       Make("c", {0.0, 0.01, 0.99, 0.0}),
                                       Make("", {0.1, 0.1, 0.8, 0.0}),
                                       Make("", {0.1, 0.1, 0.8, 0.0})};
  ApplyRepetitionRule(in, kRep, {});
  CHECK(in[0].scores[kRep] == 0.995);
  CHECK(in[1].scores[kRep] == 0.0);
  CHECK(ArgmaxTechnique(in[1].scores) == kDoubt);
  CHECK(in[2].scores[kRep] == 0.99);
  // Empty keys are left alone and never match each other.
  CHECK(in[3].scores[kRep] == 0.8);
  CHECK(in[4].scores[kRep] == 0.8);
}

TEST_CASE("repetition rule against its definition") {
  std::mt19937_64 rng(31);
  const TcRuleConfig cfg;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<TechniqueInstance> in;
    const size_t n = 1 + testing::Index(rng, 8);
    for (size_t i = 0; i < n; ++i) {
      const size_t key = testing::Index(rng, 5);
      auto p = testing::RandomSimplex(rng, 4);
      const size_t r = testing::Index(rng, 6);
      if (r == 0) p[kRep] = 0.001;
      if (r == 1) p[kRep] = 0.99;
      in.push_back(Make(key == 0 ? "" : "k" + std::to_string(key), p));
    }
    const auto before = in;
    ApplyRepetitionRule(in, kRep, cfg);
    for (size_t i = 0; i < n; ++i) {
      const auto &b = before[i].scores;
      const auto &a = in[i].scores;
      for (size_t k = 0; k < 4; ++k) {
        if (k != kRep) CHECK(a[k] == b[k]);
      }
      if (before[i].key.empty()) {
        CHECK(a == b);
        continue;
      }
      size_t m = 0;
      for (size_t j = 0; j < n; ++j) m += j != i && before[j].key == before[i].key;
      const bool forced = m >= 2 || (m == 1 && b[kRep] > 0.001);
      if (forced) {
        CHECK(ArgmaxTechnique(a) == kRep);
        CHECK(a[kRep] > *std::max_element(b.begin(), b.end()));
      } else if (m == 0 && b[kRep] < 0.99) {
        CHECK(a[kRep] == 0.0);
      } else {
        CHECK(a[kRep] == b[kRep]);
      }
    }
  }
}

TEST_CASE("seen-span bonus") {
  TrainingSpanMemory memory;
  memory.Add({"evil liar"}, kLoaded);
  memory.Add({"treason"}, kDoubt);
  memory.Add({"treason"}, kSlogans);
  TechniqueInstance seen = Make("evil liar", {0.4, 0.3, 0.0, 0.3});
  ApplySeenSpanBonus(seen, memory, {});
  CHECK(seen.scores[kLoaded] == doctest::Approx(0.8));
  CHECK(seen.scores[kDoubt] == 0.4);
  TechniqueInstance both = Make("treason", {0.1, 0.1, 0.1, 0.1});
  ApplySeenSpanBonus(both, memory, {});
  CHECK(both.scores == std::vector<double>{0.6, 0.1, 0.1, 0.6});
  TechniqueInstance unseen = Make("liar", {0.1, 0.1, 0.1, 0.7});
  ApplySeenSpanBonus(unseen, memory, {});
  CHECK(unseen.scores == std::vector<double>{0.1, 0.1, 0.1, 0.7});
  TechniqueInstance empty = Make("", {0.1, 0.1, 0.1, 0.7});
  CHECK_THROWS_AS(memory.Add({""}, kDoubt), ContractViolation);
  ApplySeenSpanBonus(empty, memory, {});
  CHECK(empty.scores == std::vector<double>{0.1, 0.1, 0.1, 0.7});
}

TEST_CASE("subspan consistency examples") {
  NestingTable nesting;
  nesting.Add(kSlogans, kLoaded);
  SUBCASE("commit") {
    std::vector<TechniqueInstance> in = {Make("o", {0.0, 0.1, 0.0, 0.9}, {0, 20}),
                                         Make("i", {0.40, 0.35, 0.0, 0.25}, {5, 10})};
    ApplySubspanConsistency(in, nesting, {});
    CHECK(in[1].scores == std::vector<double>{0.0, 0.35, 0.0, 0.25});
    CHECK(in[0].scores[kSlogans] == 0.9);
  }
  SUBCASE("veto") {
    std::vector<TechniqueInstance> in = {Make("o", {0.0, 0.0, 0.05, 0.95}, {0, 20}),
                                         Make("i", {0.90, 0.05, 0.0, 0.05}, {5, 10})};
    ApplySubspanConsistency(in, nesting, {});
    CHECK(in[1].scores[kDoubt] == 0.90);
  }
  SUBCASE("allowed combination") {
    std::vector<TechniqueInstance> in = {Make("o", {0.0, 0.1, 0.0, 0.9}, {0, 20}),
                                         Make("i", {0.2, 0.45, 0.0, 0.35}, {5, 10})};
    const auto before = in;
    ApplySubspanConsistency(in, nesting, {});
    CHECK(in[0].scores == before[0].scores);
    CHECK(in[1].scores == before[1].scores);
  }
  SUBCASE("equal spans are not nested") {
    std::vector<TechniqueInstance> in = {Make("o", {0.0, 0.1, 0.0, 0.9}, {5, 10}),
                                         Make("i", {0.40, 0.35, 0.0, 0.25}, {5, 10})};
    ApplySubspanConsistency(in, nesting, {});
    CHECK(in[1].scores[kDoubt] == 0.40);
  }
  SUBCASE("outer span can be the victim") {
    std::vector<TechniqueInstance> in = {Make("o", {0.5, 0.0, 0.4, 0.1}, {0, 20}),
                                         Make("i", {0.0, 0.9, 0.0, 0.1}, {5, 10})};
    ApplySubspanConsistency(in, nesting, {});
    CHECK(in[0].scores == std::vector<double>{0.0, 0.0, 0.4, 0.1});
  }
}

TEST_CASE("subspan consistency never raises scores or empties vectors") {
  std::mt19937_64 rng(32);
  NestingTable nesting;
  nesting.Add(kSlogans, kLoaded);
  nesting.Add(kDoubt, kDoubt);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<TechniqueInstance> in;
    const size_t n = 2 + testing::Index(rng, 5);
    for (size_t i = 0; i < n; ++i) {
      const size_t s = testing::Index(rng, 20);
      in.push_back(Make("k", testing::RandomSimplex(rng, 4), {s, s + 1 + testing::Index(rng, 15)}));
    }
    const auto before = in;
    ApplySubspanConsistency(in, nesting, {});
    for (size_t i = 0; i < n; ++i) {
      double mx = 0.0;
      size_t zeroed = 0;
      for (size_t k = 0; k < 4; ++k) {
        CHECK(in[i].scores[k] <= before[i].scores[k]);
        zeroed += in[i].scores[k] != before[i].scores[k];
        mx = std::max(mx, in[i].scores[k]);
      }
      CHECK(mx > 0.0);
      if (zeroed > 0) {
        const double old_max =
            *std::max_element(before[i].scores.begin(), before[i].scores.end());
        CHECK(mx * 2.0 >= old_max / std::pow(2.0, static_cast<double>(zeroed - 1)));
      }
    }
  }
}

TEST_CASE("top-n assignment") {
  const std::vector<double> s = {0.5, 0.3, 0.2, 0.0};
  CHECK(AssignMultilabel(s, 1) == std::vector<TechniqueId>{0});
  CHECK(AssignMultilabel(s, 2) == std::vector<TechniqueId>{0, 1});
  CHECK(AssignMultilabel(s, 4) == std::vector<TechniqueId>{0, 1, 2, 3});
  const std::vector<double> tie = {0.5, 0.25, 0.25, 0.0};
  CHECK(AssignMultilabel(tie, 2) == std::vector<TechniqueId>{0, 1});
  CHECK_THROWS_AS(AssignMultilabel(s, 5), ContractViolation);
  CHECK_THROWS_AS(AssignMultilabel(s, 0), ContractViolation);
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = testing::RandomSimplex(rng, 6);
    const size_t n = 1 + testing::Index(rng, 6);
    const auto got = AssignMultilabel(p, n);
    CHECK(got.size() == n);
    CHECK(std::set<TechniqueId>(got.begin(), got.end()).size() == n);
    CHECK(got[0] == ArgmaxTechnique(p));
  }
}

TEST_CASE("config validation") {
  TcRuleConfig cfg;
  CHECK_NOTHROW(cfg.Validate());
  cfg.rep_zero_match_keep_threshold = 1.5;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg = {};
  cfg.subspan_max_drop_factor = 0.5;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
}

TEST_CASE("missing repetition technique") {
  const TechniqueSet techniques({"Doubt", "Slogans"});
  const StopwordList stopwords = StopwordList::Default();
  const std::vector<Article> articles = {{"1", U"some words here"}};
  std::vector<TcRow> rows(1);
  rows[0].article_id = "1";
  rows[0].span = {0, 4};
  const std::vector<std::vector<std::vector<double>>> members = {{{0.5, 0.5}}};
  TcCascadeInputs inputs;
  inputs.rows = rows;
  inputs.members = members;
  inputs.articles = articles;
  inputs.stopwords = &stopwords;
  inputs.techniques = &techniques;
  TcRuleConfig cfg;
  cfg.stages.bonus = cfg.stages.subspan = false;
  CHECK_THROWS_AS(RunCascade(inputs, cfg), ConfigError);
  cfg.stages.repetition = false;
  CHECK(RunCascade(inputs, cfg) == std::vector<TechniqueId>{0});
}

TEST_CASE("memory and nesting tables") {
  const TechniqueSet techniques = Techniques();
  const std::vector<Article> articles = {{"1", U"The evil liars lied. Of the. Evil liar!"}};
  std::vector<TcRow> rows(4);
  rows[0] = {0, "1", {4, 14}, kLoaded, 1};
  rows[1] = {1, "1", {0, 19}, kSlogans, 1};
  rows[2] = {2, "1", {21, 27}, kDoubt, 1};
  rows[3] = {3, "1", {28, 39}, kRep, 1};
  const auto memory = TrainingSpanMemory::Build(rows, articles, StopwordList::Default());
  CHECK(memory.size() == 2);
  REQUIRE(memory.Find({"evil liar"}) != nullptr);
  CHECK(*memory.Find({"evil liar"}) == std::set<TechniqueId>{kLoaded, kRep});
  CHECK(memory.Find({""}) == nullptr);
  std::ostringstream out;
  memory.Write(out, techniques);
  std::istringstream in(out.str());
  CHECK(TrainingSpanMemory::Read(in, "m", techniques) == memory);
  std::istringstream bad("evil liar\tNo_Such_Technique\n");
  CHECK_THROWS_AS(TrainingSpanMemory::Read(bad, "m", techniques), FormatError);

  const NestingTable nesting = NestingTable::Build(rows);
  CHECK(nesting.size() == 1);
  CHECK(nesting.Contains(kSlogans, kLoaded));
  CHECK_FALSE(nesting.Contains(kLoaded, kSlogans));
  std::ostringstream nout;
  nesting.Write(nout, techniques);
  CHECK(nout.str() == "Slogans\tLoaded_Language\n");
  std::istringstream nin(nout.str());
  CHECK(NestingTable::Read(nin, "n", techniques) == nesting);
}

}  // TEST_SUITE

}  // namespace
}  // namespace propspan
