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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "jsonl.h"
#include "propspan/emissions.h"
#include "propspan/kernels.h"
#include "propspan/utf8.h"
#include "random_util.h"

namespace propspan {

using nlohmann::json;

namespace {

constexpr size_t K = kNumBioTags;
constexpr const char *kModelFormat = "propspan-emitter";

std::string LowerAscii(std::string s) {
  for (char &c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::string Shape(const std::string &text) {
  bool upper = false, lower = false, digit = false, other = false;
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') {
      upper = true;
    } else if (c >= 'a' && c <= 'z') {
      lower = true;
    } else if (c >= '0' && c <= '9') {
      digit = true;
    } else {
      other = true;
    }
  }
  if (!upper && !lower && !digit && text.size() == 1 && other &&
      static_cast<unsigned char>(text[0]) < 0x80) {
    return "Punct";
  }
  if (digit && !upper && !lower && !other) return "Digit";
  if (upper && !lower && !digit && !other) return text.size() == 1 ? "Cap" : "Upper";
  if (lower && !upper && !digit && !other) return "lower";
  if (upper && text[0] >= 'A' && text[0] <= 'Z' &&
      std::none_of(text.begin() + 1, text.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) {
    return "Cap";
  }
  return "Mixed";
}

bool IsPunctToken(const Token &token) {
  const std::u32string cps = DecodeUtf8(token.text);
  return cps.size() == 1 && !IsAlnum(cps[0]);
}

void Softmax(std::span<double> v) {
  const double m = kernels::MaxValue(v);
  double sum = 0.0;
  for (double &x : v) {
    x = std::exp(x - m);
    sum += x;
  }
  kernels::Scale(1.0 / sum, v);
}

}  // namespace

std::vector<std::string> FeaturizeToken(std::span<const Token> tokens, size_t index) {
  const Token &tok = tokens[index];
  std::vector<std::string> f;
  f.reserve(7);
  f.push_back("bias");
  f.push_back("id=" + LowerAscii(tok.text));
  f.push_back("shape=" + Shape(tok.text));
  if (IsPunctToken(tok)) f.push_back("punct");
  f.push_back("prev=" + (index == 0 ? std::string("<s>") : LowerAscii(tokens[index - 1].text)));
  f.push_back("next=" + (index + 1 == tokens.size() ? std::string("</s>")
                                                    : LowerAscii(tokens[index + 1].text)));
  const size_t len = DecodeUtf8(tok.text).size();
  f.push_back("len=" + (len >= 8 ? std::string("8+") : std::to_string(len)));
  return f;
}

std::vector<TaggedSentence> BuildTaggedCorpus(std::span<const Article> articles,
                                              const SiLabels &gold) {
  std::vector<TaggedSentence> corpus;
  corpus.reserve(articles.size());
  for (const Article &a : articles) {
    TaggedSentence s;
    s.tokens = Tokenize(a);
    auto it = gold.find(a.id);
    const std::vector<CharSpan> none;
    s.tags = EncodeBio(s.tokens, it == gold.end() ? none : it->second);
    corpus.push_back(std::move(s));
  }
  return corpus;
}

void FeatureScorerModel::Reindex() {
  index.clear();
  for (size_t i = 0; i < features.size(); ++i) {
    index.emplace(features[i], static_cast<uint32_t>(i));
  }
}

std::vector<EncodedToken> EncodeTokens(const FeatureScorerModel &model,
                                       std::span<const TaggedSentence> corpus) {
  std::vector<EncodedToken> encoded;
  for (const TaggedSentence &s : corpus) {
    for (size_t t = 0; t < s.tokens.size(); ++t) {
      EncodedToken e;
      for (const std::string &name : FeaturizeToken(s.tokens, t)) {
        auto it = model.index.find(name);
        if (it != model.index.end()) e.features.push_back(it->second);
      }
      e.gold = t < s.tags.size() ? s.tags[t] : BioTag::kO;
      encoded.push_back(std::move(e));
    }
  }
  return encoded;
}

ScorerObjective FeatureScorerObjective(const Matrix &weights,
                                       std::span<const EncodedToken> tokens,
                                       double l2) {
  ScorerObjective out;
  out.grad = Matrix(weights.rows(), weights.cols());
  if (tokens.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(tokens.size());
  std::vector<double> probs(K);
  for (const EncodedToken &tok : tokens) {
    std::fill(probs.begin(), probs.end(), 0.0);
    for (uint32_t f : tok.features) kernels::Axpy(1.0, weights.row(f), probs);
    const size_t gold = TagIndex(tok.gold);
    const double log_z = [&] {
      const double m = kernels::MaxValue(probs);
      double s = 0.0;
      for (double v : probs) s += std::exp(v - m);
      return m + std::log(s);
    }();
    out.loss += (log_z - probs[gold]) * inv_n;
    Softmax(probs);
    probs[gold] -= 1.0;
    for (uint32_t f : tok.features) kernels::Axpy(inv_n, probs, out.grad.row(f));
  }
  if (l2 > 0.0) {
    out.loss += 0.5 * l2 * kernels::SumSquares(weights.values());
    kernels::Axpy(l2, weights.values(), out.grad.values());
  }
  return out;
}

FeatureScorerModel TrainFeatureScorer(std::span<const TaggedSentence> corpus,
                                      const FeatureScorerTrainConfig &config) {
  if (!(config.learning_rate > 0.0) || config.epochs < 1 || config.l2 < 0.0) {
    throw ConfigError("TrainFeatureScorer: invalid configuration");
  }
  std::set<std::string> names;
  for (const TaggedSentence &s : corpus) {
    for (size_t t = 0; t < s.tokens.size(); ++t) {
      for (std::string &f : FeaturizeToken(s.tokens, t)) names.insert(std::move(f));
    }
  }
  if (names.empty()) throw ConfigError("TrainFeatureScorer: empty training corpus");
  FeatureScorerModel model;
  model.features.assign(names.begin(), names.end());
  model.Reindex();
  model.weights = Matrix(model.features.size(), K);
  std::mt19937_64 rng(config.seed);
  for (double &w : model.weights.values()) w = SymmetricUniform(rng, config.init_scale);

  const std::vector<EncodedToken> tokens = EncodeTokens(model, corpus);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const ScorerObjective obj = FeatureScorerObjective(model.weights, tokens, config.l2);
    if (!std::isfinite(obj.loss)) {
      throw NumericalError("TrainFeatureScorer: non-finite objective at epoch " +
                           std::to_string(epoch));
    }
    kernels::Axpy(-config.learning_rate, obj.grad.values(), model.weights.values());
  }
  return model;
}

Matrix ScoreTokens(const FeatureScorerModel &model, std::span<const Token> tokens) {
  Matrix scores(tokens.size(), K);
  for (size_t t = 0; t < tokens.size(); ++t) {
    for (const std::string &name : FeaturizeToken(tokens, t)) {
      auto it = model.index.find(name);
      if (it != model.index.end()) kernels::Axpy(1.0, model.weights.row(it->second), scores.row(t));
    }
  }
  return scores;
}

std::vector<EmissionRecord> EmitCorpus(const FeatureScorerModel &model,
                                       std::span<const Article> articles) {
  std::vector<EmissionRecord> records;
  records.reserve(articles.size());
  for (const Article &a : articles) {
    const std::vector<Token> tokens = Tokenize(a);
    EmissionRecord r;
    r.article_id = a.id;
    for (const Token &t : tokens) r.tokens.push_back(t.span);
    r.scores = ScoreTokens(model, tokens);
    records.push_back(std::move(r));
  }
  return records;
}

void SaveFeatureScorer(const std::string &path, const FeatureScorerModel &model) {
  json features = json::array();
  for (size_t i = 0; i < model.features.size(); ++i) {
    const auto row = model.weights.row(i);
    features.push_back({{"name", model.features[i]},
                        {"weights", std::vector<double>(row.begin(), row.end())}});
  }
  json doc = {{"format", kModelFormat},
              {"template_version", model.template_version},
              {"tags", {"O", "B-PROP", "I-PROP"}},
              {"features", std::move(features)}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(1) << '\n';
  if (!out) throw IoError("error writing " + path);
}

FeatureScorerModel LoadFeatureScorer(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception &e) {
    throw FormatError(path + ": invalid JSON: " + e.what());
  }
  try {
    if (doc.at("format") != kModelFormat) throw FormatError(path + ": not an emitter model");
    FeatureScorerModel model;
    model.template_version = doc.at("template_version").get<int>();
    if (model.template_version != kFeatureTemplateVersion) {
      throw FormatError(path + ": unsupported feature template version " +
                        std::to_string(model.template_version));
    }
    const json &features = doc.at("features");
    model.weights = Matrix(features.size(), K);
    for (size_t i = 0; i < features.size(); ++i) {
      model.features.push_back(features[i].at("name").get<std::string>());
      const json &w = features[i].at("weights");
      if (!w.is_array() || w.size() != K) {
        throw FormatError(path + ": feature weights must have 3 entries");
      }
      for (size_t k = 0; k < K; ++k) model.weights(i, k) = RequireFinite(w[k], path, 0);
    }
    model.Reindex();
    if (model.index.size() != model.features.size()) {
      throw FormatError(path + ": duplicate feature names");
    }
    return model;
  } catch (const json::exception &e) {
    throw FormatError(path + ": malformed emitter model: " + e.what());
  }
}

}  // namespace propspan
