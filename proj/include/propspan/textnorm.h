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

#ifndef PROPSPAN_TEXTNORM_H_
#define PROPSPAN_TEXTNORM_H_

#include <iosfwd>
#include <set>
#include <string>
#include <string_view>

namespace propspan {

// Porter's original (1980) suffix-stripping algorithm, steps 1a through 5b.
// Expects a lowercase word; words of length <= 2 are returned unchanged.
std::string PorterStem(std::string_view word);

class StopwordList {
 public:
  // Entries must be non-empty, lowercase and whitespace-free.
  explicit StopwordList(std::set<std::string> words);

  // One word per line, '#' starts a comment.
  static StopwordList Load(const std::string &path);
  static StopwordList Parse(std::istream &in, const std::string &what);
  // The shipped English list (data/stopwords.txt).
  static StopwordList Default();

  bool Contains(const std::string &word) const { return words_.count(word) > 0; }
  size_t size() const { return words_.size(); }
  const std::set<std::string> &words() const { return words_; }

 private:
  std::set<std::string> words_;
};

// Canonical span text used for repetition and seen-span matching:
// lowercased, non-alphanumerics replaced by spaces, stopwords dropped,
// alphabetic words Porter-stemmed, joined by single spaces. Digit runs and
// mixed tokens are kept unstemmed. An empty key matches nothing.
struct SpanKey {
  std::string canonical;

  bool empty() const { return canonical.empty(); }
  auto operator<=>(const SpanKey &) const = default;
};

SpanKey MakeSpanKey(std::string_view utf8_text, const StopwordList &stopwords);
SpanKey MakeSpanKey(std::u32string_view text, const StopwordList &stopwords);

}  // namespace propspan

#endif  // PROPSPAN_TEXTNORM_H_
