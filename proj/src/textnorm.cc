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

#include "propspan/textnorm.h"

#include <fstream>
#include <sstream>

#include "default_data.h"
#include "propspan/errors.h"
#include "propspan/utf8.h"

namespace propspan {

StopwordList::StopwordList(std::set<std::string> words) : words_(std::move(words)) {
  if (words_.empty()) throw ConfigError("stopword list is empty");
  for (const std::string &w : words_) {
    for (char c : w) {
      if ((c >= 'A' && c <= 'Z') || c == ' ' || c == '\t') {
        throw ConfigError("stopword '" + w + "' must be lowercase without whitespace");
      }
    }
  }
}

StopwordList StopwordList::Load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open stopword file " + path);
  return Parse(in, path);
}

StopwordList StopwordList::Parse(std::istream &in, const std::string &what) {
  std::set<std::string> words;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const size_t last = line.find_last_not_of(" \t\r");
    std::string word = line.substr(first, last - first + 1);
    if (word.find_first_of(" \t") != std::string::npos) {
      throw ConfigError(Located(what, number, "stopword contains whitespace"));
    }
    words.insert(std::move(word));
  }
  return StopwordList(std::move(words));
}

StopwordList StopwordList::Default() {
  std::istringstream in(DefaultStopwordsText());
  return Parse(in, "<default stopwords>");
}

SpanKey MakeSpanKey(std::string_view utf8_text, const StopwordList &stopwords) {
  return MakeSpanKey(DecodeUtf8(utf8_text), stopwords);
}

SpanKey MakeSpanKey(std::u32string_view text, const StopwordList &stopwords) {
  std::string key;
  size_t i = 0;
  while (i < text.size()) {
    if (!IsAlnum(text[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    bool alphabetic = true;
    std::u32string word;
    while (j < text.size() && IsAlnum(text[j])) {
      const char32_t c = ToLowerAscii(text[j]);
      alphabetic = alphabetic && c >= U'a' && c <= U'z';
      word.push_back(c);
      ++j;
    }
    i = j;
    std::string utf8 = EncodeUtf8(word);
    if (stopwords.Contains(utf8)) continue;
    if (alphabetic) utf8 = PorterStem(utf8);
    if (!key.empty()) key.push_back(' ');
    key += utf8;
  }
  return SpanKey{std::move(key)};
}

}  // namespace propspan
