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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "jsonl.h"
#include "propspan/emissions.h"

namespace propspan {

using nlohmann::json;

double RoundToEmissionPrecision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::strtod(buf, nullptr);
}

std::vector<EmissionRecord> ParseEmissions(std::istream &in, const std::string &what) {
  std::vector<EmissionRecord> records;
  ForEachJsonLine(in, what, [&](const json &rec, size_t line) {
    EmissionRecord r;
    const json &id = RequireField(rec, "article_id", what, line);
    if (!id.is_string() || id.get<std::string>().empty()) {
      throw FormatError(Located(what, line, "article_id must be a non-empty string"));
    }
    r.article_id = id.get<std::string>();
    const json &tokens = RequireField(rec, "tokens", what, line);
    const json &scores = RequireField(rec, "scores", what, line);
    if (!tokens.is_array() || !scores.is_array()) {
      throw FormatError(Located(what, line, "tokens and scores must be arrays"));
    }
    if (tokens.size() != scores.size()) {
      throw FormatError(Located(what, line,
                                std::to_string(tokens.size()) + " tokens but " +
                                    std::to_string(scores.size()) + " score rows"));
    }
    for (const json &t : tokens) {
      if (!t.is_array() || t.size() != 2) {
        throw FormatError(Located(what, line, "token must be a [start,end] pair"));
      }
      CharSpan span{RequireOffset(t[0], what, line), RequireOffset(t[1], what, line)};
      if (span.end <= span.start) {
        throw FormatError(Located(what, line, "token end must exceed start"));
      }
      if (!r.tokens.empty() && span.start < r.tokens.back().end) {
        throw FormatError(Located(what, line, "token spans must be sorted and disjoint"));
      }
      r.tokens.push_back(span);
    }
    r.scores = Matrix(tokens.size(), kNumBioTags);
    for (size_t t = 0; t < scores.size(); ++t) {
      const json &row = scores[t];
      if (!row.is_array() || row.size() != kNumBioTags) {
        throw FormatError(Located(what, line,
                                  "score row " + std::to_string(t) + " must have " +
                                      std::to_string(kNumBioTags) + " entries (O, B-PROP, I-PROP)"));
      }
      for (size_t k = 0; k < kNumBioTags; ++k) {
        r.scores(t, k) = RequireFinite(row[k], what, line);
      }
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<EmissionRecord> ReadEmissions(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return ParseEmissions(in, path);
}

void WriteEmissions(std::ostream &out, std::span<const EmissionRecord> records) {
  for (const EmissionRecord &r : records) {
    json tokens = json::array();
    for (const CharSpan &s : r.tokens) tokens.push_back({s.start, s.end});
    json scores = json::array();
    for (size_t t = 0; t < r.scores.rows(); ++t) {
      json row = json::array();
      for (size_t k = 0; k < r.scores.cols(); ++k) {
        row.push_back(RoundToEmissionPrecision(r.scores(t, k)));
      }
      scores.push_back(std::move(row));
    }
    json rec;
    rec["article_id"] = r.article_id;
    rec["tokens"] = std::move(tokens);
    rec["scores"] = std::move(scores);
    out << rec.dump() << '\n';
  }
}

void SaveEmissions(const std::string &path, std::span<const EmissionRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  WriteEmissions(out, records);
  if (!out) throw IoError("error writing " + path);
}

void CheckEmissionsAlignment(std::span<const EmissionRecord> records,
                             std::span<const Article> articles,
                             const std::string &what) {
  ArticleIndex index(articles);
  std::set<std::string> seen;
  for (size_t i = 0; i < records.size(); ++i) {
    const EmissionRecord &r = records[i];
    const size_t line = i + 1;
    const Article *article = index.Find(r.article_id);
    if (article == nullptr) {
      throw FormatError(Located(what, line, "unknown article id " + r.article_id));
    }
    if (!seen.insert(r.article_id).second) {
      throw FormatError(Located(what, line, "duplicate record for article " + r.article_id));
    }
    const std::vector<Token> tokens = Tokenize(*article);
    if (tokens.size() != r.tokens.size()) {
      throw FormatError(Located(what, line,
                                "article " + r.article_id + " has " +
                                    std::to_string(tokens.size()) +
                                    " tokens, record has " + std::to_string(r.tokens.size())));
    }
    for (size_t t = 0; t < tokens.size(); ++t) {
      if (tokens[t].span != r.tokens[t]) {
        throw FormatError(Located(
            what, line,
            "token " + std::to_string(t) + " of article " + r.article_id +
                " is (" + std::to_string(r.tokens[t].start) + "," +
                std::to_string(r.tokens[t].end) + "), corpus has (" +
                std::to_string(tokens[t].span.start) + "," +
                std::to_string(tokens[t].span.end) + ")"));
      }
    }
  }
}

}  // namespace propspan
