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

#ifndef PROPSPAN_SPAN_POST_H_
#define PROPSPAN_SPAN_POST_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propspan/corpus.h"
#include "propspan/crf.h"
#include "propspan/matrix.h"

namespace propspan {

struct SiPrediction {
  std::string article_id;
  std::vector<CharSpan> spans;  // sorted, pairwise disjoint once finalized

  bool operator==(const SiPrediction &) const = default;
};

// Straight double and single quotes plus the curly variants U+2018, U+2019,
// U+201C and U+201D.
bool IsQuoteMark(char32_t c);

// Shrinks the span from both ends until its first and last characters are
// alphanumeric. Returns nullopt when nothing alphanumeric remains.
std::optional<CharSpan> TrimToAlnum(CharSpan span, std::u32string_view text);

// Widens the span by one character on each side when it is immediately
// preceded and followed by quotation marks. Applied once.
CharSpan ExpandQuotes(CharSpan span, std::u32string_view text);

// Interval union across ensemble members; overlapping spans become one
// superspan, touching spans stay separate. All inputs must share an article.
SiPrediction MergeUnion(std::span<const SiPrediction> predictions);

struct SiStages {
  bool crf = true;           // Viterbi decoding; otherwise per-token argmax
  bool trim = true;          // TrimToAlnum
  bool quotes = true;        // ExpandQuotes
  bool quotes_first = false; // run quote expansion before trimming
};

// Tags for one article: Viterbi over the CRF, or the per-token argmax of the
// emission rows (ties to the lower tag index) when stages.crf is off.
TagSequence DecodeTags(const Matrix &emissions, const CrfParams &params, bool use_crf);

// Trimming and quote expansion in the configured order, then interval
// union so the result is sorted and disjoint. Spans emptied by trimming
// are dropped.
std::vector<CharSpan> PostprocessSpans(std::span<const CharSpan> spans,
                                       std::u32string_view text, const SiStages &stages);

// Decode -> BIO spans -> post-processing for one article and one ensemble
// member. `emissions` rows must match the article's tokenization.
SiPrediction DecodeAndPostprocess(const Article &article, const Matrix &emissions,
                                  const CrfParams &params, const SiStages &stages);

}  // namespace propspan

#endif  // PROPSPAN_SPAN_POST_H_
