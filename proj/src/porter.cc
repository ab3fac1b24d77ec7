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

#include <string>
#include <string_view>

#include "propspan/textnorm.h"

namespace propspan {

namespace {

// Working state over a lowercase word. `end` marks the current stem end
// after a suffix has been matched by EndsWith().
class PorterWord {
 public:
  explicit PorterWord(std::string_view w) : b_(w) {}

  std::string str() const { return b_; }

  void Step1a() {
    if (EndsWith("sses")) {
      SetTo("ss");
    } else if (EndsWith("ies")) {
      SetTo("i");
    } else if (EndsWith("ss")) {
      // unchanged
    } else if (EndsWith("s")) {
      SetTo("");
    }
  }

  void Step1b() {
    if (EndsWith("eed")) {
      if (Measure() > 0) SetTo("ee");
      return;
    }
    bool stripped = false;
    if (EndsWith("ed") && StemHasVowel()) {
      SetTo("");
      stripped = true;
    } else if (EndsWith("ing") && StemHasVowel()) {
      SetTo("");
      stripped = true;
    }
    if (!stripped) return;
    if (EndsWith("at")) {
      SetTo("ate");
    } else if (EndsWith("bl")) {
      SetTo("ble");
    } else if (EndsWith("iz")) {
      SetTo("ize");
    } else if (EndsWithDoubleConsonant(b_.size())) {
      const char last = b_.back();
      if (last != 'l' && last != 's' && last != 'z') b_.pop_back();
    } else {
      stem_end_ = b_.size();
      if (Measure() == 1 && EndsCvc(b_.size())) b_.push_back('e');
    }
  }

  void Step1c() {
    if (EndsWith("y") && StemHasVowel()) b_.back() = 'i';
  }

  void Step2() {
    static constexpr Rule kRules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
        {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
        {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
        {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
        {"iviti", "ive"},   {"biliti", "ble"},
    };
    ApplyLongest(kRules, 0);
  }

  void Step3() {
    static constexpr Rule kRules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    };
    ApplyLongest(kRules, 0);
  }

  void Step4() {
    static constexpr Rule kRules[] = {
        {"al", ""},   {"ance", ""}, {"ence", ""}, {"er", ""},   {"ic", ""},
        {"able", ""}, {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""},
        {"ent", ""},  {"ion", ""},  {"ou", ""},   {"ism", ""},  {"ate", ""},
        {"iti", ""},  {"ous", ""},  {"ive", ""},  {"ize", ""},
    };
    const Rule *rule = LongestMatch(kRules);
    if (rule == nullptr) return;
    if (Measure() <= 1) return;
    if (std::string_view(rule->suffix) == "ion") {
      if (stem_end_ == 0) return;
      const char before = b_[stem_end_ - 1];
      if (before != 's' && before != 't') return;
    }
    SetTo(rule->replacement);
  }

  void Step5a() {
    if (!EndsWith("e")) return;
    const int m = Measure();
    if (m > 1 || (m == 1 && !EndsCvc(stem_end_))) b_.pop_back();
  }

  void Step5b() {
    stem_end_ = b_.size();
    if (b_.size() >= 2 && b_.back() == 'l' && EndsWithDoubleConsonant(b_.size()) &&
        Measure() > 1) {
      b_.pop_back();
    }
  }

 private:
  struct Rule {
    const char *suffix;
    const char *replacement;
  };

  bool IsConsonant(size_t i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !IsConsonant(i - 1);
      default:
        return true;
    }
  }

  // m in [C](VC)^m[V] over b_[0, stem_end_).
  int Measure() const {
    int m = 0;
    size_t i = 0;
    const size_t n = stem_end_;
    while (i < n && IsConsonant(i)) ++i;
    while (i < n) {
      while (i < n && !IsConsonant(i)) ++i;
      if (i >= n) break;
      while (i < n && IsConsonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool StemHasVowel() const {
    for (size_t i = 0; i < stem_end_; ++i) {
      if (!IsConsonant(i)) return true;
    }
    return false;
  }

  bool EndsWithDoubleConsonant(size_t end) const {
    return end >= 2 && b_[end - 1] == b_[end - 2] && IsConsonant(end - 1);
  }

  // *o: stem ends consonant-vowel-consonant, last consonant not w, x or y.
  bool EndsCvc(size_t end) const {
    if (end < 3) return false;
    if (!IsConsonant(end - 1) || IsConsonant(end - 2) || !IsConsonant(end - 3)) {
      return false;
    }
    const char c = b_[end - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool EndsWith(std::string_view suffix) {
    if (suffix.size() > b_.size()) return false;
    if (b_.compare(b_.size() - suffix.size(), suffix.size(), suffix) != 0) {
      return false;
    }
    stem_end_ = b_.size() - suffix.size();
    return true;
  }

  void SetTo(std::string_view replacement) {
    b_.resize(stem_end_);
    b_.append(replacement);
  }

  template <size_t N>
  const Rule *LongestMatch(const Rule (&rules)[N]) {
    const Rule *best = nullptr;
    size_t best_len = 0;
    for (const Rule &r : rules) {
      const size_t len = std::string_view(r.suffix).size();
      if (len > best_len && EndsWith(r.suffix)) {
        best = &r;
        best_len = len;
      }
    }
    if (best != nullptr) EndsWith(best->suffix);
    return best;
  }

  // Only the longest matching suffix is considered; if its condition fails
  // the step leaves the word alone.
  template <size_t N>
  void ApplyLongest(const Rule (&rules)[N], int min_measure_exclusive) {
    const Rule *rule = LongestMatch(rules);
    if (rule != nullptr && Measure() > min_measure_exclusive) {
      SetTo(rule->replacement);
    }
  }

  std::string b_;
  size_t stem_end_ = 0;
};

}  // namespace

std::string PorterStem(std::string_view word) {
  if (word.empty()) return std::string();
  PorterWord w(word);
  w.Step1a();
  w.Step1b();
  w.Step1c();
  w.Step2();
  w.Step3();
  w.Step4();
  w.Step5a();
  w.Step5b();
  return w.str();
}

}  // namespace propspan
