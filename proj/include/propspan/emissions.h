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

#ifndef PROPSPAN_EMISSIONS_H_
#define PROPSPAN_EMISSIONS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "propspan/corpus.h"
#include "propspan/matrix.h"

namespace propspan {

// One line of an emission file: per-token BIO scores for one article.
//   {"article_id": "111", "tokens": [[0,2],[3,5]], "scores": [[o,b,i],[o,b,i]]}
struct EmissionRecord {
  std::string article_id;
  std::vector<CharSpan> tokens;
  Matrix scores;  // tokens.size() x 3

  bool operator==(const EmissionRecord &) const = default;
};

std::vector<EmissionRecord> ReadEmissions(const std::string &path);
std::vector<EmissionRecord> ParseEmissions(std::istream &in, const std::string &what);

// Scores are written with 9 significant digits, so write(read(write(x)))
// is byte-identical to write(x).
void WriteEmissions(std::ostream &out, std::span<const EmissionRecord> records);
void SaveEmissions(const std::string &path, std::span<const EmissionRecord> records);

// Checks every record against the corpus tokenization (exact offsets) and
// that each article appears at most once. Throws FormatError on mismatch.
void CheckEmissionsAlignment(std::span<const EmissionRecord> records,
                             std::span<const Article> articles,
                             const std::string &what);

// Rounds to 9 significant digits, the precision of the emission format.
double RoundToEmissionPrecision(double v);

// ---------------------------------------------------------------------------
// Feature-based token scorer: a multinomial logistic regression over sparse
// indicator features, used as a desk-scale emission source.

inline constexpr int kFeatureTemplateVersion = 1;

// bias, id=, shape=, punct, prev=, next=, len=
std::vector<std::string> FeaturizeToken(std::span<const Token> tokens, size_t index);

struct TaggedSentence {
  std::vector<Token> tokens;
  std::vector<BioTag> tags;
};

// Tokens of each article with their BIO encoding of the gold spans.
std::vector<TaggedSentence> BuildTaggedCorpus(std::span<const Article> articles,
                                              const SiLabels &gold);

struct FeatureScorerModel {
  int template_version = kFeatureTemplateVersion;
  std::vector<std::string> features;  // sorted; row order of weights
  Matrix weights;                     // features.size() x 3

  // Index lookup; built by Reindex().
  std::unordered_map<std::string, uint32_t> index;
  void Reindex();

  bool operator==(const FeatureScorerModel &other) const {
    return template_version == other.template_version &&
           features == other.features && weights == other.weights;
  }
};

struct EncodedToken {
  std::vector<uint32_t> features;
  BioTag gold = BioTag::kO;
};

// Maps tokens onto the model's feature dictionary; unknown features drop.
std::vector<EncodedToken> EncodeTokens(const FeatureScorerModel &model,
                                       std::span<const TaggedSentence> corpus);

struct ScorerObjective {
  double loss = 0.0;  // mean cross-entropy + l2 * |w|^2 / 2
  Matrix grad;
};

ScorerObjective FeatureScorerObjective(const Matrix &weights,
                                       std::span<const EncodedToken> tokens,
                                       double l2);

struct FeatureScorerTrainConfig {
  double learning_rate = 10.0;
  int epochs = 1000;
  double l2 = 1e-4;
  uint64_t seed = 1;
  double init_scale = 0.01;
};

// Full-batch gradient descent, deterministic in the seed. Throws
// NumericalError on a non-finite objective.
FeatureScorerModel TrainFeatureScorer(std::span<const TaggedSentence> corpus,
                                      const FeatureScorerTrainConfig &config);

// T x 3 emission table: the linear score of each tag.
Matrix ScoreTokens(const FeatureScorerModel &model, std::span<const Token> tokens);

// Emission records for a whole corpus, in article order.
std::vector<EmissionRecord> EmitCorpus(const FeatureScorerModel &model,
                                       std::span<const Article> articles);

void SaveFeatureScorer(const std::string &path, const FeatureScorerModel &model);
FeatureScorerModel LoadFeatureScorer(const std::string &path);

}  // namespace propspan

#endif  // PROPSPAN_EMISSIONS_H_
