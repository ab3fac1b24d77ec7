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

#include <set>
#include <sstream>

#include "doctest.h"
#include "propspan/corpus.h"
#include "propspan/errors.h"
#include "propspan/utf8.h"
#include "test_support.h"

namespace propspan {
namespace {

using testing::TempDir;
using testing::WriteAll;

std::vector<Article> OneArticle(const std::string &id, const std::u32string &text) {
  return {Article{id, text}};
}

TEST_SUITE("corpus") {

TEST_CASE("load articles") {
  TempDir dir;
  WriteAll(dir / "article111.txt", "He is a liar.");
  WriteAll(dir / "article20.txt", "Caf\xC3\xA9!");
  WriteAll(dir / "notes.txt", "ignored");
  const std::vector<Article> articles = LoadArticles(dir.path());
  REQUIRE(articles.size() == 2);
  CHECK(articles[0].id == "20");
  CHECK(articles[0].text == U"Café!");
  CHECK(articles[0].length() == 5);
  CHECK(articles[1].id == "111");
  CHECK(articles[1].text == U"He is a liar.");
  CHECK(articles[1].Slice({8, 12}) == "liar");
}

TEST_CASE("empty directory and missing directory") {
  TempDir dir;
  CHECK(LoadArticles(dir.path()).empty());
  CHECK_THROWS_AS(LoadArticles(dir / "missing"), IoError);
}

TEST_CASE("duplicate ids") {
  TempDir dir;
  WriteAll(dir / "article7.txt", "a");
  WriteAll(dir / "article007.txt", "b");
  CHECK_THROWS_AS(LoadArticles(dir.path()), FormatError);
}

TEST_CASE("invalid utf-8 article") {
  TempDir dir;
  WriteAll(dir / "article1.txt", "bad \xFF byte");
  CHECK_THROWS_AS(LoadArticles(dir.path()), FormatError);
}

TEST_CASE("si labels") {
  const auto articles = OneArticle("111", U"He is a liar.");
  std::istringstream in("111\t8\t12\n\n111\t0\t2\r\n");
  const SiLabels labels = ParseSiLabels(in, "labels.tsv", articles);
  // Spans come back sorted within each article.
  CHECK(labels.at("111") == std::vector<CharSpan>{{0, 2}, {8, 12}});
  std::ostringstream out;
  WriteSiLabels(out, labels);
  std::istringstream back(out.str());
  CHECK(ParseSiLabels(back, "again", articles) == labels);
}

TEST_CASE("si label errors carry file and line") {
  const auto articles = OneArticle("111", U"He is a liar.");
  auto fails = [&](const std::string &text, const std::string &fragment) {
    std::istringstream in(text);
    try {
      ParseSiLabels(in, "labels.tsv", articles);
    } catch (const FormatError &e) {
      const std::string msg = e.what();
      CHECK(msg.find(fragment) != std::string::npos);
      CHECK(msg.find("labels.tsv:") != std::string::npos);
      return;
    }
    FAIL("no error for: " << text);
  };
  fails("111\t12\t8\n", "end must exceed start");
  fails("111\t8\t8\n", "end must exceed start");
  fails("999\t0\t2\n", "unknown article");
  fails("111\t0\n", "3 tab-separated");
  fails("111\t0\tx\n", "non-integer");
  fails("111\t0\t-1\n", "non-integer");
  fails("111\t10\t14\n", "outside article");
  fails("111\t0\t1\n111\t2\n", "labels.tsv:2");
}

TEST_CASE("tc rows and multiplicity") {
  const auto articles = OneArticle("5", std::u32string(30, U'x'));
  const TechniqueSet techniques = TechniqueSet::Default();
  std::istringstream in(
      "5\t?\t10\t20\n5\t?\t10\t20\n5\t?\t0\t4\n");
  const auto rows = ParseTcRows(in, "rows", articles, false, techniques);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].multiplicity == 2);
  CHECK(rows[1].multiplicity == 2);
  CHECK(rows[2].multiplicity == 1);
  CHECK(rows[2].ordinal == 2);
  CHECK_FALSE(rows[0].technique.has_value());

  std::istringstream labeled("5\tLoaded_Language\t0\t4\n");
  const auto lrows = ParseTcRows(labeled, "gold", articles, true, techniques);
  CHECK(lrows[0].technique == techniques.Find("Loaded_Language"));
  std::istringstream unknown("5\tNot_A_Technique\t0\t4\n");
  CHECK_THROWS_AS(ParseTcRows(unknown, "gold", articles, true, techniques), FormatError);
  std::istringstream short_row("5\t0\t4\n");
  CHECK_THROWS_AS(ParseTcRows(short_row, "gold", articles, true, techniques), FormatError);

  std::ostringstream out;
  WriteTcRows(out, lrows, techniques);
  CHECK(out.str() == "5\tLoaded_Language\t0\t4\n");
}

TEST_CASE("technique sets") {
  const TechniqueSet d = TechniqueSet::Default();
  CHECK(d.size() == 14);
  CHECK(d.Find(kRepetitionTechnique).has_value());
  CHECK(d.name(0) == "Appeal_to_Authority");
  std::istringstream custom("# comment\nA\n\nB\n");
  const TechniqueSet c = TechniqueSet::Parse(custom, "custom");
  CHECK(c.names() == std::vector<std::string>{"A", "B"});
  CHECK_FALSE(c.Find(kRepetitionTechnique).has_value());
  std::istringstream dup("A\nA\n");
  CHECK_THROWS_AS(TechniqueSet::Parse(dup, "dup"), ConfigError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(TechniqueSet::Parse(empty, "empty"), ConfigError);
}

TEST_CASE("tokenize") {
  const auto tokens = Tokenize(std::u32string_view(U"He is a liar."));
  REQUIRE(tokens.size() == 5);
  CHECK(tokens[0] == Token{"He", {0, 2}});
  CHECK(tokens[3] == Token{"liar", {8, 12}});
  CHECK(tokens[4] == Token{".", {12, 13}});
  CHECK(Tokenize(std::u32string_view(U"")).empty());
  const auto quoted = Tokenize(std::u32string_view(U"\"death!\""));
  REQUIRE(quoted.size() == 4);
  CHECK(quoted[0].span == CharSpan{0, 1});
  CHECK(quoted[1].span == CharSpan{1, 6});
  CHECK(quoted[2].span == CharSpan{6, 7});
  CHECK(quoted[3].span == CharSpan{7, 8});
  const auto unicode = Tokenize(std::u32string_view(U"“Café” — x"));
  REQUIRE(unicode.size() == 5);
  CHECK(unicode[1].text == "Caf\xC3\xA9");
  CHECK(unicode[1].span == CharSpan{1, 5});
}

TEST_CASE("merge overlapping") {
  CHECK(MergeOverlapping({{5, 8}, {0, 5}}) == std::vector<CharSpan>{{0, 5}, {5, 8}});
  CHECK(MergeOverlapping({{0, 5}, {3, 8}, {10, 12}}) ==
        std::vector<CharSpan>{{0, 8}, {10, 12}});
  CHECK(MergeOverlapping({{0, 10}, {2, 3}}) == std::vector<CharSpan>{{0, 10}});
}

TEST_CASE("train/dev split") {
  std::vector<Article> articles;
  for (int i = 0; i < 10; ++i) articles.push_back({std::to_string(i), U"x"});
  const CorpusSplit a = SplitTrainDev(articles, 0.2, 5);
  const CorpusSplit b = SplitTrainDev(articles, 0.2, 5);
  CHECK(a.heldout.size() == 2);
  CHECK(a.train.size() == 8);
  std::set<std::string> ids;
  for (const auto &x : a.train) ids.insert(x.id);
  for (const auto &x : a.heldout) ids.insert(x.id);
  CHECK(ids.size() == 10);
  CHECK(a.heldout[0].id == b.heldout[0].id);
  CHECK(a.heldout[1].id == b.heldout[1].id);
  // Input order does not matter.
  std::vector<Article> reversed(articles.rbegin(), articles.rend());
  const CorpusSplit c = SplitTrainDev(reversed, 0.2, 5);
  CHECK(c.heldout[0].id == a.heldout[0].id);
  // Held-out side is never empty nor everything.
  CHECK(SplitTrainDev(articles, 0.01, 5).heldout.size() == 1);
  CHECK(SplitTrainDev(articles, 0.99, 5).train.size() == 1);
  CHECK_THROWS_AS(SplitTrainDev(articles, 0.0, 5), ConfigError);
  CHECK_THROWS_AS(SplitTrainDev(std::vector<Article>{articles[0]}, 0.5, 5), ConfigError);
  bool differs = false;
  for (uint64_t seed = 6; seed < 20 && !differs; ++seed) {
    differs = SplitTrainDev(articles, 0.2, seed).heldout[0].id != a.heldout[0].id;
  }
  CHECK(differs);
}

}  // TEST_SUITE

}  // namespace
}  // namespace propspan
