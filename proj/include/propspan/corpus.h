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

#ifndef PROPSPAN_CORPUS_H_
#define PROPSPAN_CORPUS_H_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace propspan {

// Half-open interval [start, end) of character offsets (Unicode scalar
// values, newline counted as one character).
struct CharSpan {
  size_t start = 0;
  size_t end = 0;

  size_t length() const { return end - start; }
  bool Contains(const CharSpan &other) const {
    return start <= other.start && other.end <= end;
  }
  // Strict containment: other lies inside this span and the two differ.
  bool StrictlyContains(const CharSpan &other) const {
    return Contains(other) && !(start == other.start && end == other.end);
  }
  size_t Overlap(const CharSpan &other) const {
    const size_t lo = start > other.start ? start : other.start;
    const size_t hi = end < other.end ? end : other.end;
    return hi > lo ? hi - lo : 0;
  }

  auto operator<=>(const CharSpan &) const = default;
};

struct Article {
  std::string id;
  std::u32string text;

  size_t length() const { return text.size(); }
  // UTF-8 text of a span.
  std::string Slice(const CharSpan &span) const;
};

struct Token {
  std::string text;
  CharSpan span;

  bool operator==(const Token &) const = default;
};

enum class BioTag : uint8_t { kO = 0, kBegin = 1, kInside = 2 };
inline constexpr size_t kNumBioTags = 3;

const char *BioTagName(BioTag tag);
inline size_t TagIndex(BioTag tag) { return static_cast<size_t>(tag); }

using TechniqueId = int;

// Ordered technique inventory; indices follow file order.
class TechniqueSet {
 public:
  TechniqueSet() = default;
  explicit TechniqueSet(std::vector<std::string> names);

  // One name per line; blank lines and '#' comments ignored.
  static TechniqueSet Load(const std::string &path);
  static TechniqueSet Parse(std::istream &in, const std::string &what);
  // The shipped 14-technique inventory (data/techniques.txt).
  static TechniqueSet Default();

  size_t size() const { return names_.size(); }
  const std::string &name(TechniqueId id) const { return names_.at(id); }
  const std::vector<std::string> &names() const { return names_; }
  std::optional<TechniqueId> Find(const std::string &name) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, TechniqueId> index_;
};

inline constexpr const char *kRepetitionTechnique = "Repetition";

struct LabeledSpan {
  CharSpan span;
  TechniqueId technique = 0;

  auto operator<=>(const LabeledSpan &) const = default;
};

// One line of a TC file. Rows keep their file ordinal so predictions can be
// written back line-aligned.
struct TcRow {
  size_t ordinal = 0;
  std::string article_id;
  CharSpan span;
  std::optional<TechniqueId> technique;
  // Number of rows sharing (article_id, span).
  size_t multiplicity = 1;
};

using SiLabels = std::map<std::string, std::vector<CharSpan>>;

// Reads article<ID>.txt files. Result sorted by id (numerically when both
// ids are digit strings). Ids differing only in leading zeros are duplicates.
std::vector<Article> LoadArticles(const std::string &dir);

// Id-keyed view over a set of articles.
class ArticleIndex {
 public:
  explicit ArticleIndex(std::span<const Article> articles);
  const Article *Find(const std::string &id) const;
  const Article &Get(const std::string &id) const;  // throws FormatError

 private:
  std::unordered_map<std::string, const Article *> by_id_;
};

// SI label TSV: article_id \t start \t end.
SiLabels LoadSiLabels(const std::string &path, std::span<const Article> articles);
SiLabels ParseSiLabels(std::istream &in, const std::string &what,
                       std::span<const Article> articles);
void WriteSiLabels(std::ostream &out, const SiLabels &labels);
void SaveSiLabels(const std::string &path, const SiLabels &labels);

// TC TSV: article_id \t technique \t start \t end. The technique column is
// validated only when with_labels is set; "?" marks unlabeled rows.
std::vector<TcRow> LoadTcRows(const std::string &path,
                              std::span<const Article> articles,
                              bool with_labels, const TechniqueSet &techniques);
std::vector<TcRow> ParseTcRows(std::istream &in, const std::string &what,
                               std::span<const Article> articles,
                               bool with_labels, const TechniqueSet &techniques);
void WriteTcRows(std::ostream &out, std::span<const TcRow> rows,
                 const TechniqueSet &techniques);
void SaveTcRows(const std::string &path, std::span<const TcRow> rows,
                const TechniqueSet &techniques);

// Labeled rows grouped per article, sorted. Rows without a technique are
// skipped.
std::map<std::string, std::vector<LabeledSpan>> GroupLabeledSpans(
    std::span<const TcRow> rows);

// Alphanumeric runs form tokens; every other non-space character is a
// single-character token.
std::vector<Token> Tokenize(const Article &article);
std::vector<Token> Tokenize(std::u32string_view text);

// Union of intervals; spans with a non-empty intersection are coalesced,
// touching spans stay separate. Output sorted and pairwise disjoint.
std::vector<CharSpan> MergeOverlapping(std::vector<CharSpan> spans);

std::vector<BioTag> EncodeBio(std::span<const Token> tokens,
                              std::span<const CharSpan> spans);
// Lenient: an I-PROP after O (or at position 0) opens a new span.
std::vector<CharSpan> DecodeBio(std::span<const Token> tokens,
                                std::span<const BioTag> tags);

struct CorpusSplit {
  std::vector<Article> train;
  std::vector<Article> heldout;
};

// Whole-article random partition, deterministic in seed. The held-out side
// receives round(fraction * N) articles, clamped to [1, N - 1].
CorpusSplit SplitTrainDev(std::span<const Article> articles, double fraction,
                          uint64_t seed);

// Reads a whole file as UTF-8 text; throws IoError naming the file.
std::string ReadFileBytes(const std::string &path);

}  // namespace propspan

#endif  // PROPSPAN_CORPUS_H_
