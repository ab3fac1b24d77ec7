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

#ifndef PROPSPAN_CRF_H_
#define PROPSPAN_CRF_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "propspan/corpus.h"
#include "propspan/matrix.h"

namespace propspan {

// Linear-chain CRF over the three BIO tags. Emission tables are T x 3
// log-domain score matrices, one row per word-level token.

inline constexpr size_t kCrfTags = kNumBioTags;

// Hard transition constraints. A forbidden entry scores -infinity no matter
// what the stored parameter holds.
struct CrfMask {
  std::array<std::array<bool, kCrfTags>, kCrfTags> transition{};
  std::array<bool, kCrfTags> start{};

  static CrfMask None() { return {}; }
  // Forbids O -> I-PROP and a leading I-PROP.
  static CrfMask Bio();

  bool any() const;
  bool operator==(const CrfMask &) const = default;
};

// Transition, start and end scores. The mask is fixed at construction.
class CrfParams {
 public:
  explicit CrfParams(CrfMask mask = CrfMask::None());

  const CrfMask &mask() const { return mask_; }

  double &transition(size_t from, size_t to) { return transitions_(from, to); }
  double transition(size_t from, size_t to) const { return transitions_(from, to); }
  double &start(size_t tag) { return start_[tag]; }
  double start(size_t tag) const { return start_[tag]; }
  double &end(size_t tag) { return end_[tag]; }
  double end(size_t tag) const { return end_[tag]; }

  // Scores with the mask applied.
  double EffectiveTransition(size_t from, size_t to) const;
  double EffectiveStart(size_t tag) const;

  bool operator==(const CrfParams &) const = default;

 private:
  CrfMask mask_;
  Matrix transitions_{kCrfTags, kCrfTags};
  std::array<double, kCrfTags> start_{};
  std::array<double, kCrfTags> end_{};
};

// Same shape as the trainable part of CrfParams.
struct CrfGradient {
  Matrix transitions{kCrfTags, kCrfTags};
  std::array<double, kCrfTags> start{};
  std::array<double, kCrfTags> end{};
};

using TagSequence = std::vector<BioTag>;

// start[y1] + sum_t emissions[t][yt] + sum_t trans[y(t-1)][yt] + end[yT];
// -infinity if the path uses a masked transition.
double SequenceScore(const Matrix &emissions, const CrfParams &params,
                     std::span<const BioTag> tags);

// log of the sum over all 3^T paths of exp(SequenceScore), by the forward
// recursion with log-sum-exp.
double LogPartition(const Matrix &emissions, const CrfParams &params);

struct ViterbiResult {
  TagSequence tags;
  double score = 0.0;
};

// Highest-scoring path. Ties go to the lower tag index, resolved from the
// last position backwards.
ViterbiResult Viterbi(const Matrix &emissions, const CrfParams &params);

// T x 3 matrix of posterior tag probabilities P(y_t = k | x).
Matrix Marginals(const Matrix &emissions, const CrfParams &params);

struct LabeledSequence {
  Matrix emissions;
  TagSequence gold;
};

struct CrfLoss {
  double nll = 0.0;
  CrfGradient grad;
  // d nll / d emissions, one matrix per batch element.
  std::vector<Matrix> grad_emissions;
};

// Summed negative log-likelihood plus l2 * |params|^2 / 2 over the unmasked
// parameters, with exact gradients from forward-backward. Masked entries get
// zero gradient.
CrfLoss CrfNllAndGrad(std::span<const LabeledSequence> batch,
                      const CrfParams &params, double l2);

struct CrfTrainConfig {
  double learning_rate = 0.5;
  int epochs = 100;
  double l2 = 1e-3;
  uint64_t seed = 1;
  double init_scale = 0.01;
  CrfMask mask = CrfMask::None();
};

// Full-batch gradient descent on the mean per-sequence objective, starting
// from uniform noise in [-init_scale, init_scale]. With a held-out set the
// epoch with the lowest held-out NLL is returned, otherwise the last one.
// Throws NumericalError if the objective becomes non-finite.
CrfParams TrainCrf(std::span<const LabeledSequence> train, const CrfTrainConfig &config,
                   std::span<const LabeledSequence> heldout = {});

// Text format with shortest round-trip number formatting; reading back
// yields bit-identical parameters.
void WriteCrfParams(std::ostream &out, const CrfParams &params);
CrfParams ReadCrfParams(std::istream &in, const std::string &what);
void SaveCrfParams(const std::string &path, const CrfParams &params);
CrfParams LoadCrfParams(const std::string &path);

// Numerically stable log(sum(exp(x))); -infinity for an empty or all
// -infinity input.
double LogSumExp(std::span<const double> x);

}  // namespace propspan

#endif  // PROPSPAN_CRF_H_
