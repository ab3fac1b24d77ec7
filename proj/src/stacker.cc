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

#include "propspan/stacker.h"

#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"
#include "propspan/errors.h"
#include "propspan/kernels.h"
#include "random_util.h"

namespace propspan {

using nlohmann::json;

namespace {

constexpr const char *kModelFormat = "propspan-stacker";

std::vector<double> StackInput(std::span<const std::vector<double>> member_probs,
                               const StackerModel &model) {
  if (member_probs.size() != model.members) {
    throw ContractViolation("StackPredict: expected " + std::to_string(model.members) +
                            " members, got " + std::to_string(member_probs.size()));
  }
  std::vector<double> x;
  x.reserve(model.input_size());
  for (const std::vector<double> &p : member_probs) {
    if (p.size() != model.techniques) {
      throw ContractViolation("StackPredict: member vector has " + std::to_string(p.size()) +
                              " entries, expected " + std::to_string(model.techniques));
    }
    x.insert(x.end(), p.begin(), p.end());
  }
  x.push_back(1.0);
  return x;
}

// In-place softmax; returns log of the normalizer.
double SoftmaxInPlace(std::vector<double> &z) {
  const double m = kernels::MaxValue(z);
  double sum = 0.0;
  for (double &v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  kernels::Scale(1.0 / sum, z);
  return m + std::log(sum);
}

}  // namespace

StackerModel MakeStackerModel(size_t members, size_t techniques) {
  if (members == 0 || techniques == 0) throw ConfigError("stacker needs members and techniques");
  StackerModel model;
  model.members = members;
  model.techniques = techniques;
  model.weights = Matrix(members * techniques + 1, techniques);
  return model;
}

std::vector<double> StackPredict(std::span<const std::vector<double>> member_probs,
                                 const StackerModel &model) {
  const std::vector<double> x = StackInput(member_probs, model);
  std::vector<double> z(model.techniques);
  kernels::GemvT(model.weights, x, z);
  SoftmaxInPlace(z);
  return z;
}

StackerObjectiveValue StackerObjective(const StackerModel &model,
                                       std::span<const StackerExample> examples,
                                       double l2) {
  StackerObjectiveValue out;
  out.grad = Matrix(model.weights.rows(), model.weights.cols());
  if (!examples.empty()) {
    const double inv_n = 1.0 / static_cast<double>(examples.size());
    std::vector<double> z(model.techniques);
    for (const StackerExample &ex : examples) {
      const std::vector<double> x = StackInput(ex.member_probs, model);
      if (ex.gold < 0 || static_cast<size_t>(ex.gold) >= model.techniques) {
        throw ContractViolation("StackerObjective: gold label out of range");
      }
      kernels::GemvT(model.weights, x, z);
      const double gold_score = z[ex.gold];
      const double log_z = SoftmaxInPlace(z);
      out.loss += (log_z - gold_score) * inv_n;
      z[ex.gold] -= 1.0;
      kernels::Ger(inv_n, x, z, out.grad);
    }
  }
  if (l2 > 0.0) {
    out.loss += 0.5 * l2 * kernels::SumSquares(model.weights.values());
    kernels::Axpy(l2, model.weights.values(), out.grad.values());
  }
  return out;
}

StackerModel TrainStacker(std::span<const StackerExample> examples,
                          const StackerTrainConfig &config) {
  if (examples.empty()) throw ConfigError("TrainStacker: no training examples");
  if (!(config.learning_rate > 0.0) || config.epochs < 1 || config.l2 < 0.0) {
    throw ConfigError("TrainStacker: invalid configuration");
  }
  const size_t members = examples.front().member_probs.size();
  const size_t techniques = members ? examples.front().member_probs.front().size() : 0;
  StackerModel model = MakeStackerModel(members, techniques);
  std::mt19937_64 rng(config.seed);
  for (double &w : model.weights.values()) w = SymmetricUniform(rng, config.init_scale);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const StackerObjectiveValue obj = StackerObjective(model, examples, config.l2);
    if (!std::isfinite(obj.loss)) {
      throw NumericalError("TrainStacker: non-finite objective at epoch " +
                           std::to_string(epoch));
    }
    kernels::Axpy(-config.learning_rate, obj.grad.values(), model.weights.values());
  }
  return model;
}

std::vector<StackerExample> BuildStackerExamples(
    std::span<const TcRow> gold_rows,
    std::span<const std::vector<std::vector<double>>> members, size_t techniques) {
  std::vector<StackerExample> examples;
  examples.reserve(gold_rows.size());
  for (size_t r = 0; r < gold_rows.size(); ++r) {
    const TcRow &row = gold_rows[r];
    if (!row.technique) {
      throw ContractViolation("BuildStackerExamples: row " + std::to_string(row.ordinal) +
                              " has no gold technique");
    }
    StackerExample ex;
    ex.gold = *row.technique;
    for (size_t m = 0; m < members.size(); ++m) {
      if (row.ordinal >= members[m].size() || members[m][row.ordinal].size() != techniques) {
        throw ContractViolation("BuildStackerExamples: member " + std::to_string(m) +
                                " is misaligned at row ordinal " +
                                std::to_string(row.ordinal));
      }
      ex.member_probs.push_back(members[m][row.ordinal]);
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

void SaveStacker(const std::string &path, const StackerModel &model) {
  json rows = json::array();
  for (size_t r = 0; r < model.weights.rows(); ++r) {
    const auto row = model.weights.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  json doc = {{"format", kModelFormat},
              {"members", model.members},
              {"techniques", model.techniques},
              {"weights", std::move(rows)}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump() << '\n';
  if (!out) throw IoError("error writing " + path);
}

StackerModel LoadStacker(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    const json doc = json::parse(in);
    if (doc.at("format") != kModelFormat) throw FormatError(path + ": not a stacker model");
    StackerModel model =
        MakeStackerModel(doc.at("members").get<size_t>(), doc.at("techniques").get<size_t>());
    const json &rows = doc.at("weights");
    if (rows.size() != model.weights.rows()) {
      throw FormatError(path + ": weight matrix has the wrong number of rows");
    }
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != model.weights.cols()) {
        throw FormatError(path + ": weight row " + std::to_string(r) + " has the wrong width");
      }
      for (size_t c = 0; c < rows[r].size(); ++c) {
        const double w = rows[r][c].get<double>();
        if (!std::isfinite(w)) throw FormatError(path + ": non-finite weight");
        model.weights(r, c) = w;
      }
    }
    return model;
  } catch (const json::exception &e) {
    throw FormatError(path + ": malformed stacker model: " + e.what());
  }
}

}  // namespace propspan
