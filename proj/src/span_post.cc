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

#include "propspan/span_post.h"

#include "propspan/errors.h"
#include "propspan/utf8.h"

namespace propspan {

bool IsQuoteMark(char32_t c) {
  return c == U'"' || c == U'\'' || c == 0x2018 || c == 0x2019 || c == 0x201C ||
         c == 0x201D;
}

std::optional<CharSpan> TrimToAlnum(CharSpan span, std::u32string_view text) {
  if (span.end > text.size() || span.start >= span.end) {
    throw ContractViolation("TrimToAlnum: span empty or outside text");
  }
  while (span.start < span.end && !IsAlnum(text[span.start])) ++span.start;
  while (span.end > span.start && !IsAlnum(text[span.end - 1])) --span.end;
  if (span.start == span.end) return std::nullopt;
  return span;
}

CharSpan ExpandQuotes(CharSpan span, std::u32string_view text) {
  if (span.end > text.size() || span.start >= span.end) {
    throw ContractViolation("ExpandQuotes: span empty or outside text");
  }
  if (span.start == 0 || span.end >= text.size()) return span;
  if (IsQuoteMark(text[span.start - 1]) && IsQuoteMark(text[span.end])) {
    return {span.start - 1, span.end + 1};
  }
  return span;
}

SiPrediction MergeUnion(std::span<const SiPrediction> predictions) {
  SiPrediction merged;
  if (predictions.empty()) return merged;
  merged.article_id = predictions.front().article_id;
  std::vector<CharSpan> all;
  for (const SiPrediction &p : predictions) {
    if (p.article_id != merged.article_id) {
      throw ContractViolation("MergeUnion: mixed article ids " + merged.article_id +
                              " and " + p.article_id);
    }
    all.insert(all.end(), p.spans.begin(), p.spans.end());
  }
  merged.spans = MergeOverlapping(std::move(all));
  return merged;
}

TagSequence DecodeTags(const Matrix &emissions, const CrfParams &params, bool use_crf) {
  if (use_crf) return Viterbi(emissions, params).tags;
  TagSequence tags(emissions.rows(), BioTag::kO);
  for (size_t t = 0; t < emissions.rows(); ++t) {
    size_t best = 0;
    for (size_t k = 1; k < emissions.cols(); ++k) {
      if (emissions(t, k) > emissions(t, best)) best = k;
    }
    tags[t] = static_cast<BioTag>(best);
  }
  return tags;
}

std::vector<CharSpan> PostprocessSpans(std::span<const CharSpan> spans,
                                       std::u32string_view text, const SiStages &stages) {
  std::vector<CharSpan> out;
  out.reserve(spans.size());
  for (CharSpan span : spans) {
    if (stages.quotes && stages.quotes_first) span = ExpandQuotes(span, text);
    if (stages.trim) {
      const std::optional<CharSpan> trimmed = TrimToAlnum(span, text);
      if (!trimmed) continue;
      span = *trimmed;
    }
    if (stages.quotes && !stages.quotes_first) span = ExpandQuotes(span, text);
    out.push_back(span);
  }
  return MergeOverlapping(std::move(out));
}

SiPrediction DecodeAndPostprocess(const Article &article, const Matrix &emissions,
                                  const CrfParams &params, const SiStages &stages) {
  const std::vector<Token> tokens = Tokenize(article);
  if (tokens.size() != emissions.rows()) {
    throw ContractViolation("DecodeAndPostprocess: article " + article.id + " has " +
                            std::to_string(tokens.size()) + " tokens but " +
                            std::to_string(emissions.rows()) + " emission rows");
  }
  SiPrediction prediction;
  prediction.article_id = article.id;
  if (tokens.empty()) return prediction;
  const TagSequence tags = DecodeTags(emissions, params, stages.crf);
  const std::vector<CharSpan> raw = DecodeBio(tokens, tags);
  prediction.spans = PostprocessSpans(raw, article.text, stages);
  return prediction;
}

}  // namespace propspan
