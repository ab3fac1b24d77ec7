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

#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "propspan/textnorm.h"
#include "test_support.h"

namespace propspan {
namespace {

TEST_SUITE("porter") {

TEST_CASE("reference vocabulary") {
  // word<TAB>stem pairs produced by an independent implementation of the
  // original algorithm.
  std::ifstream in(testing::SourcePath("tests/data/porter_vocab.tsv"));
  REQUIRE(in);
  std::string line;
  size_t checked = 0, mismatched = 0;
  while (std::getline(in, line)) {
    const size_t tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const std::string word = line.substr(0, tab), stem = line.substr(tab + 1);
    const std::string got = PorterStem(word);
    if (got != stem) {
      ++mismatched;
      INFO(word << " -> " << got << ", expected " << stem);
      CHECK(got == stem);
    }
    CHECK(got.size() <= word.size() + 1);
    ++checked;
  }
  CHECK(checked > 7000);
  CHECK(mismatched == 0);
}

TEST_CASE("examples") {
  CHECK(PorterStem("caresses") == "caress");
  CHECK(PorterStem("ponies") == "poni");
  CHECK(PorterStem("ties") == "ti");
  CHECK(PorterStem("happy") == "happi");
  CHECK(PorterStem("generalizations") == "gener");
  CHECK(PorterStem("rational") == "ration");
  CHECK(PorterStem("feed") == "feed");
  CHECK(PorterStem("agreed") == "agre");
  CHECK(PorterStem("hopping") == "hop");
  CHECK(PorterStem("filing") == "file");
  CHECK(PorterStem("a") == "a");
  CHECK(PorterStem("is") == "i");
  CHECK(PorterStem("") == "");
}

}  // TEST_SUITE

TEST_SUITE("textnorm") {

StopwordList Only(std::initializer_list<std::string> words) {
  return StopwordList(std::set<std::string>(words));
}

TEST_CASE("span key examples") {
  CHECK(MakeSpanKey("The LIARS, the liars!", Only({"the"})).canonical == "liar liar");
  CHECK(MakeSpanKey("of the", StopwordList::Default()).empty());
  CHECK(MakeSpanKey("Make America Great Again", Only({"the"})).canonical ==
        "make america great again");
  CHECK(MakeSpanKey("Make America Great Again", StopwordList::Default()).canonical ==
        "make america great");
  CHECK(MakeSpanKey("", StopwordList::Default()).empty());
  CHECK(MakeSpanKey("--!!", StopwordList::Default()).empty());
}

TEST_CASE("digit runs and mixed tokens are kept unstemmed") {
  CHECK(MakeSpanKey("In 2016, 9/11 and covid19s", Only({"in", "and"})).canonical ==
        "2016 9 11 covid19s");
}

TEST_CASE("non-ascii letters split nothing") {
  CHECK(MakeSpanKey(U"“Señores” — liars", Only({"the"})).canonical == "señores liar");
}

TEST_CASE("utf-8 and decoded inputs agree") {
  CHECK(MakeSpanKey("Caf\xC3\xA9 owners", Only({"the"})) == MakeSpanKey(U"Café owners", Only({"the"})));
}

std::string RandomText(std::mt19937_64 &rng) {
  static const std::vector<std::string> words = {
      "the", "liars", "Liar", "crooked", "MEDIA", "of", "fake", "news", "and", "2020",
      "great", "again", "walls", "Build", "a", "it's", "ponies"};
  static const std::string punct = ".,;:!?\"'()-";
  std::string out;
  const size_t n = testing::Index(rng, 7);
  for (size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += words[testing::Index(rng, words.size())];
  }
  return out;
}

std::string Upper(std::string s) {
  for (char &c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

TEST_CASE("span key invariances") {
  std::mt19937_64 rng(31);
  const StopwordList stop = StopwordList::Default();
  static const std::string punct = ".,;:!?\"()-";
  for (int trial = 0; trial < 500; ++trial) {
    const std::string text = RandomText(rng);
    const SpanKey key = MakeSpanKey(text, stop);
    CHECK(MakeSpanKey(Upper(text), stop) == key);
    CHECK(MakeSpanKey("  \t" + text + "  \n", stop) == key);
    // Punctuation-only edits: insert punctuation next to existing spaces
    // or at the ends.
    std::string edited;
    for (char c : text) {
      if (c == ' ') edited += punct[testing::Index(rng, punct.size())];
      edited += c;
    }
    edited += punct[testing::Index(rng, punct.size())];
    CHECK(MakeSpanKey(edited, stop) == key);
    for (char c : key.canonical) {
      CHECK(((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ' '));
    }
    CHECK(key.canonical.find("  ") == std::string::npos);
  }
}

TEST_CASE("stopword files") {
  std::istringstream in("# header\nthe\n\nof  # trailing comment\n");
  const StopwordList list = StopwordList::Parse(in, "stop");
  CHECK(list.size() == 2);
  CHECK(list.Contains("the"));
  CHECK(list.Contains("of"));
  std::istringstream upper("The\n");
  CHECK_THROWS(StopwordList::Parse(upper, "stop"));
  std::istringstream spaced("two words\n");
  CHECK_THROWS(StopwordList::Parse(spaced, "stop"));
  std::istringstream empty("# only comments\n");
  CHECK_THROWS(StopwordList::Parse(empty, "stop"));
  CHECK(StopwordList::Default().size() > 100);
  CHECK_THROWS(StopwordList::Load("/nonexistent/stopwords.txt"));
}

}  // TEST_SUITE

}  // namespace
}  // namespace propspan
