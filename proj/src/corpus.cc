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

#include "propspan/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "default_data.h"
#include "propspan/errors.h"
#include "propspan/utf8.h"
#include "random_util.h"

namespace propspan {

namespace fs = std::filesystem;

namespace {

bool AllDigits(const std::string &s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string StripLeadingZeros(const std::string &s) {
  const size_t pos = s.find_first_not_of('0');
  return pos == std::string::npos ? "0" : s.substr(pos);
}

// Numeric ids order by value, everything else lexicographically after them.
bool IdLess(const std::string &a, const std::string &b) {
  const bool na = AllDigits(a), nb = AllDigits(b);
  if (na && nb) {
    const std::string sa = StripLeadingZeros(a), sb = StripLeadingZeros(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
    return a < b;
  }
  if (na != nb) return na;
  return a < b;
}

std::string CanonicalId(const std::string &id) {
  return AllDigits(id) ? StripLeadingZeros(id) : id;
}

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

size_t ParseOffset(const std::string &field, const std::string &what,
                   size_t line) {
  size_t value = 0;
  const char *first = field.data();
  const char *last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw FormatError(Located(what, line, "non-integer offset '" + field + "'"));
  }
  return value;
}

CharSpan ParseSpan(const std::string &start, const std::string &end,
                   const Article &article, const std::string &what,
                   size_t line) {
  CharSpan span{ParseOffset(start, what, line), ParseOffset(end, what, line)};
  if (span.end <= span.start) {
    throw FormatError(Located(what, line, "span end must exceed start"));
  }
  if (span.end > article.length()) {
    throw FormatError(Located(
        what, line,
        "span (" + std::to_string(span.start) + "," + std::to_string(span.end) +
            ") outside article " + article.id + " of length " +
            std::to_string(article.length())));
  }
  return span;
}

// Yields lines with trailing '\r' removed, skipping blank ones.
template <typename Fn>
void ForEachLine(std::istream &in, Fn &&fn) {
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line, number);
  }
}

std::ifstream OpenInput(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream OpenOutput(const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

}  // namespace

std::string Article::Slice(const CharSpan &span) const {
  return EncodeUtf8(std::u32string_view(text).substr(span.start, span.length()));
}

const char *BioTagName(BioTag tag) {
  switch (tag) {
    case BioTag::kO: return "O";
    case BioTag::kBegin: return "B-PROP";
    case BioTag::kInside: return "I-PROP";
  }
  return "?";
}

TechniqueSet::TechniqueSet(std::vector<std::string> names)
    : names_(std::move(names)) {
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty() || names_[i] == "?") {
      throw ConfigError("invalid technique name '" + names_[i] + "'");
    }
    if (!index_.emplace(names_[i], static_cast<TechniqueId>(i)).second) {
      throw ConfigError("duplicate technique '" + names_[i] + "'");
    }
  }
}

TechniqueSet TechniqueSet::Load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open technique file " + path);
  return Parse(in, path);
}

TechniqueSet TechniqueSet::Parse(std::istream &in, const std::string &what) {
  std::vector<std::string> names;
  ForEachLine(in, [&](std::string &line, size_t) {
    const size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') return;
    const size_t last = line.find_last_not_of(" \t");
    names.push_back(line.substr(first, last - first + 1));
  });
  if (names.empty()) throw ConfigError(what + ": empty technique set");
  return TechniqueSet(std::move(names));
}

TechniqueSet TechniqueSet::Default() {
  std::istringstream in(DefaultTechniquesText());
  return Parse(in, "<default techniques>");
}

std::optional<TechniqueId> TechniqueSet::Find(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string ReadFileBytes(const std::string &path) {
  std::ifstream in = OpenInput(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return buffer.str();
}

std::vector<Article> LoadArticles(const std::string &dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir);
  std::vector<Article> articles;
  std::map<std::string, std::string> seen;  // canonical id -> filename
  for (const auto &entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() <= 11 || name.rfind("article", 0) != 0 ||
        name.substr(name.size() - 4) != ".txt") {
      continue;
    }
    std::string id = name.substr(7, name.size() - 11);
    auto [it, inserted] = seen.emplace(CanonicalId(id), name);
    if (!inserted) {
      throw FormatError("duplicate article id " + id + " (" + it->second +
                        ", " + name + ")");
    }
    const std::string path = entry.path().string();
    articles.push_back({std::move(id), DecodeUtf8(ReadFileBytes(path), path)});
  }
  std::sort(articles.begin(), articles.end(),
            [](const Article &a, const Article &b) { return IdLess(a.id, b.id); });
  return articles;
}

ArticleIndex::ArticleIndex(std::span<const Article> articles) {
  for (const Article &a : articles) {
    if (!by_id_.emplace(a.id, &a).second) {
      throw FormatError("duplicate article id " + a.id);
    }
  }
}

const Article *ArticleIndex::Find(const std::string &id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : it->second;
}

const Article &ArticleIndex::Get(const std::string &id) const {
  const Article *a = Find(id);
  if (a == nullptr) throw FormatError("unknown article id " + id);
  return *a;
}

SiLabels ParseSiLabels(std::istream &in, const std::string &what,
                       std::span<const Article> articles) {
  ArticleIndex index(articles);
  SiLabels labels;
  ForEachLine(in, [&](std::string &line, size_t number) {
    const auto fields = SplitTabs(line);
    if (fields.size() != 3) {
      throw FormatError(Located(what, number, "expected 3 tab-separated fields"));
    }
    const Article *article = index.Find(fields[0]);
    if (article == nullptr) {
      throw FormatError(Located(what, number, "unknown article id " + fields[0]));
    }
    labels[fields[0]].push_back(
        ParseSpan(fields[1], fields[2], *article, what, number));
  });
  for (auto &[id, spans] : labels) std::sort(spans.begin(), spans.end());
  return labels;
}

SiLabels LoadSiLabels(const std::string &path, std::span<const Article> articles) {
  std::ifstream in = OpenInput(path);
  return ParseSiLabels(in, path, articles);
}

void WriteSiLabels(std::ostream &out, const SiLabels &labels) {
  std::vector<std::string> ids;
  for (const auto &[id, spans] : labels) ids.push_back(id);
  std::sort(ids.begin(), ids.end(), IdLess);
  for (const std::string &id : ids) {
    for (const CharSpan &s : labels.at(id)) {
      out << id << '\t' << s.start << '\t' << s.end << '\n';
    }
  }
}

void SaveSiLabels(const std::string &path, const SiLabels &labels) {
  std::ofstream out = OpenOutput(path);
  WriteSiLabels(out, labels);
  if (!out) throw IoError("error writing " + path);
}

std::vector<TcRow> ParseTcRows(std::istream &in, const std::string &what,
                               std::span<const Article> articles,
                               bool with_labels, const TechniqueSet &techniques) {
  ArticleIndex index(articles);
  std::vector<TcRow> rows;
  ForEachLine(in, [&](std::string &line, size_t number) {
    const auto fields = SplitTabs(line);
    if (fields.size() != 4) {
      throw FormatError(Located(what, number, "expected 4 tab-separated fields"));
    }
    const Article *article = index.Find(fields[0]);
    if (article == nullptr) {
      throw FormatError(Located(what, number, "unknown article id " + fields[0]));
    }
    TcRow row;
    row.ordinal = rows.size();
    row.article_id = fields[0];
    row.span = ParseSpan(fields[2], fields[3], *article, what, number);
    if (with_labels) {
      row.technique = techniques.Find(fields[1]);
      if (!row.technique) {
        throw FormatError(Located(what, number, "unknown technique '" + fields[1] + "'"));
      }
    }
    rows.push_back(std::move(row));
  });
  std::map<std::pair<std::string, CharSpan>, size_t> counts;
  for (const TcRow &r : rows) ++counts[{r.article_id, r.span}];
  for (TcRow &r : rows) r.multiplicity = counts[{r.article_id, r.span}];
  return rows;
}

std::vector<TcRow> LoadTcRows(const std::string &path,
                              std::span<const Article> articles,
                              bool with_labels, const TechniqueSet &techniques) {
  std::ifstream in = OpenInput(path);
  return ParseTcRows(in, path, articles, with_labels, techniques);
}

void WriteTcRows(std::ostream &out, std::span<const TcRow> rows,
                 const TechniqueSet &techniques) {
  for (const TcRow &r : rows) {
    out << r.article_id << '\t'
        << (r.technique ? techniques.name(*r.technique) : std::string("?"))
        << '\t' << r.span.start << '\t' << r.span.end << '\n';
  }
}

void SaveTcRows(const std::string &path, std::span<const TcRow> rows,
                const TechniqueSet &techniques) {
  std::ofstream out = OpenOutput(path);
  WriteTcRows(out, rows, techniques);
  if (!out) throw IoError("error writing " + path);
}

std::map<std::string, std::vector<LabeledSpan>> GroupLabeledSpans(
    std::span<const TcRow> rows) {
  std::map<std::string, std::vector<LabeledSpan>> grouped;
  for (const TcRow &r : rows) {
    if (r.technique) grouped[r.article_id].push_back({r.span, *r.technique});
  }
  for (auto &[id, spans] : grouped) std::sort(spans.begin(), spans.end());
  return grouped;
}

std::vector<Token> Tokenize(const Article &article) {
  return Tokenize(article.text);
}

std::vector<Token> Tokenize(std::u32string_view text) {
  std::vector<Token> tokens;
  size_t i = 0;
  while (i < text.size()) {
    if (IsSpace(text[i])) {
      ++i;
      continue;
    }
    size_t j = i + 1;
    if (IsAlnum(text[i])) {
      while (j < text.size() && IsAlnum(text[j])) ++j;
    }
    tokens.push_back({EncodeUtf8(text.substr(i, j - i)), {i, j}});
    i = j;
  }
  return tokens;
}

std::vector<CharSpan> MergeOverlapping(std::vector<CharSpan> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<CharSpan> merged;
  for (const CharSpan &s : spans) {
    if (!merged.empty() && s.start < merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

std::vector<BioTag> EncodeBio(std::span<const Token> tokens,
                              std::span<const CharSpan> spans) {
  const std::vector<CharSpan> merged =
      MergeOverlapping(std::vector<CharSpan>(spans.begin(), spans.end()));
  std::vector<BioTag> tags(tokens.size(), BioTag::kO);
  // A token touching several merged spans joins them into one run, so the
  // encoding equals the token-snapped union of the input.
  size_t cursor = 0;  // first merged span that may still intersect
  bool in_run = false;
  size_t previous_last = 0;
  for (size_t t = 0; t < tokens.size(); ++t) {
    const CharSpan &tok = tokens[t].span;
    while (cursor < merged.size() && merged[cursor].end <= tok.start) ++cursor;
    if (cursor >= merged.size() || merged[cursor].Overlap(tok) == 0) {
      in_run = false;
      continue;
    }
    size_t last = cursor;
    while (last + 1 < merged.size() && merged[last + 1].start < tok.end) ++last;
    tags[t] = (in_run && previous_last >= cursor) ? BioTag::kInside : BioTag::kBegin;
    in_run = true;
    previous_last = last;
  }
  return tags;
}

std::vector<CharSpan> DecodeBio(std::span<const Token> tokens,
                                std::span<const BioTag> tags) {
  if (tokens.size() != tags.size()) {
    throw ContractViolation("DecodeBio: token/tag length mismatch");
  }
  std::vector<CharSpan> spans;
  bool open = false;
  for (size_t t = 0; t < tags.size(); ++t) {
    switch (tags[t]) {
      case BioTag::kO:
        open = false;
        break;
      case BioTag::kBegin:
        spans.push_back(tokens[t].span);
        open = true;
        break;
      case BioTag::kInside:
        if (open) {
          spans.back().end = tokens[t].span.end;
        } else {
          spans.push_back(tokens[t].span);
          open = true;
        }
        break;
    }
  }
  return spans;
}

CorpusSplit SplitTrainDev(std::span<const Article> articles, double fraction,
                          uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split fraction must lie in (0, 1)");
  }
  if (articles.size() < 2) {
    throw ConfigError("split needs at least 2 articles");
  }
  std::vector<size_t> order(articles.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return IdLess(articles[a].id, articles[b].id);
  });
  // Fisher-Yates; see random_util.h for why std::shuffle is avoided.
  std::mt19937_64 rng(seed);
  for (size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[UniformIndex(rng, i + 1)]);
  }
  const size_t n = articles.size();
  size_t held = static_cast<size_t>(std::llround(fraction * static_cast<double>(n)));
  held = std::clamp<size_t>(held, 1, n - 1);
  std::vector<size_t> held_idx(order.begin(), order.begin() + held);
  std::vector<size_t> train_idx(order.begin() + held, order.end());
  auto by_id = [&](size_t a, size_t b) {
    return IdLess(articles[a].id, articles[b].id);
  };
  std::sort(held_idx.begin(), held_idx.end(), by_id);
  std::sort(train_idx.begin(), train_idx.end(), by_id);
  CorpusSplit split;
  for (size_t i : train_idx) split.train.push_back(articles[i]);
  for (size_t i : held_idx) split.heldout.push_back(articles[i]);
  return split;
}

}  // namespace propspan
