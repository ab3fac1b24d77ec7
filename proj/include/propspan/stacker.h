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

#ifndef PROPSPAN_STACKER_H_
#define PROPSPAN_STACKER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "propspan/corpus.h"
#include "propspan/matrix.h"

namespace propspan {

// Multinomial logistic regression over the concatenated technique
// probabilities of N member classifiers plus a bias input.
struct StackerModel {
  size_t members = 0;
  size_t techniques = 0;
  Matrix weights;  // (members * techniques + 1) x techniques

  size_t input_size() const { return members * techniques + 1; }
  bool operator==(const StackerModel &) const = default;
};

struct StackerExample {
  std::vector<std::vector<double>> member_probs;  // N vectors of length K
  TechniqueId gold = 0;
};

// Zero-weight model of the given shape (uniform predictions).
StackerModel MakeStackerModel(size_t members, size_t techniques);

// Softmax of the affine map over [p_1 ... p_N, 1].
std::vector<double> StackPredict(std::span<const std::vector<double>> member_probs,
                                 const StackerModel &model);

struct StackerObjectiveValue {
  double loss = 0.0;  // mean cross-entropy + l2 * |W|^2 / 2
  Matrix grad;
};

StackerObjectiveValue StackerObjective(const StackerModel &model,
                                       std::span<const StackerExample> examples,
                                       double l2);

struct StackerTrainConfig {
  double learning_rate = 1.0;
  int epochs = 500;
  double l2 = 1e-4;
  uint64_t seed = 1;
  double init_scale = 0.01;
  double dev_fraction = 0.5;  // share of the development articles used for tuning
};

// Full-batch gradient descent, deterministic in the seed. Throws
// NumericalError on a non-finite objective.
StackerModel TrainStacker(std::span<const StackerExample> examples,
                          const StackerTrainConfig &config);

// Pairs gold rows with aligned member probability tables
// (members[m][ordinal]). Throws ContractViolation naming the first ordinal
// at which a member is missing or has the wrong width.
std::vector<StackerExample> BuildStackerExamples(
    std::span<const TcRow> gold_rows,
    std::span<const std::vector<std::vector<double>>> members, size_t techniques);

void SaveStacker(const std::string &path, const StackerModel &model);
StackerModel LoadStacker(const std::string &path);

}  // namespace propspan

#endif  // PROPSPAN_STACKER_H_
