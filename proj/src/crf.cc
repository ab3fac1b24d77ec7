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

#include "propspan/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "propspan/errors.h"

namespace propspan {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr size_t K = kCrfTags;

void CheckEmissions(const Matrix &emissions) {
  if (emissions.cols() != K) {
    throw ContractViolation("emission table must have " + std::to_string(K) +
                            " columns, got " + std::to_string(emissions.cols()));
  }
}

double LogSumExp3(double a, double b, double c) {
  const double m = std::max({a, b, c});
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

// alpha[t][j]: log-sum of prefix scores ending in tag j at position t.
Matrix Forward(const Matrix &e, const CrfParams &p) {
  const size_t n = e.rows();
  Matrix alpha(n, K);
  for (size_t j = 0; j < K; ++j) alpha(0, j) = p.EffectiveStart(j) + e(0, j);
  for (size_t t = 1; t < n; ++t) {
    for (size_t j = 0; j < K; ++j) {
      alpha(t, j) = LogSumExp3(alpha(t - 1, 0) + p.EffectiveTransition(0, j),
                               alpha(t - 1, 1) + p.EffectiveTransition(1, j),
                               alpha(t - 1, 2) + p.EffectiveTransition(2, j)) +
                    e(t, j);
    }
  }
  return alpha;
}

// beta[t][i]: log-sum of suffix scores after position t given tag i at t.
Matrix Backward(const Matrix &e, const CrfParams &p) {
  const size_t n = e.rows();
  Matrix beta(n, K);
  for (size_t i = 0; i < K; ++i) beta(n - 1, i) = p.end(i);
  for (size_t t = n - 1; t-- > 0;) {
    for (size_t i = 0; i < K; ++i) {
      double terms[K];
      for (size_t j = 0; j < K; ++j) {
        terms[j] = p.EffectiveTransition(i, j) + e(t + 1, j) + beta(t + 1, j);
      }
      beta(t, i) = LogSumExp3(terms[0], terms[1], terms[2]);
    }
  }
  return beta;
}

double FinalLogZ(const Matrix &alpha, const CrfParams &p) {
  const size_t last = alpha.rows() - 1;
  return LogSumExp3(alpha(last, 0) + p.end(0), alpha(last, 1) + p.end(1),
                    alpha(last, 2) + p.end(2));
}

}  // namespace

CrfMask CrfMask::Bio() {
  CrfMask mask;
  mask.transition[TagIndex(BioTag::kO)][TagIndex(BioTag::kInside)] = true;
  mask.start[TagIndex(BioTag::kInside)] = true;
  return mask;
}

bool CrfMask::any() const {
  for (size_t i = 0; i < K; ++i) {
    if (start[i]) return true;
    for (size_t j = 0; j < K; ++j) {
      if (transition[i][j]) return true;
    }
  }
  return false;
}

CrfParams::CrfParams(CrfMask mask) : mask_(mask) {}

double CrfParams::EffectiveTransition(size_t from, size_t to) const {
  return mask_.transition[from][to] ? kNegInf : transitions_(from, to);
}

double CrfParams::EffectiveStart(size_t tag) const {
  return mask_.start[tag] ? kNegInf : start_[tag];
}

double LogSumExp(std::span<const double> x) {
  if (x.empty()) return kNegInf;
  const double m = *std::max_element(x.begin(), x.end());
  if (m == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - m);
  return m + std::log(sum);
}

double SequenceScore(const Matrix &emissions, const CrfParams &params,
                     std::span<const BioTag> tags) {
  CheckEmissions(emissions);
  if (tags.size() != emissions.rows()) {
    throw ContractViolation("SequenceScore: tag/emission length mismatch");
  }
  if (tags.empty()) return 0.0;
  double score = params.EffectiveStart(TagIndex(tags[0])) + params.end(TagIndex(tags.back()));
  for (size_t t = 0; t < tags.size(); ++t) {
    score += emissions(t, TagIndex(tags[t]));
    if (t > 0) score += params.EffectiveTransition(TagIndex(tags[t - 1]), TagIndex(tags[t]));
  }
  return score;
}

double LogPartition(const Matrix &emissions, const CrfParams &params) {
  CheckEmissions(emissions);
  if (emissions.rows() == 0) throw ContractViolation("LogPartition: empty sequence");
  return FinalLogZ(Forward(emissions, params), params);
}

ViterbiResult Viterbi(const Matrix &emissions, const CrfParams &params) {
  CheckEmissions(emissions);
  const size_t n = emissions.rows();
  if (n == 0) return {};
  Matrix best(n, K);
  std::vector<std::array<uint8_t, K>> back(n);
  for (size_t j = 0; j < K; ++j) best(0, j) = params.EffectiveStart(j) + emissions(0, j);
  for (size_t t = 1; t < n; ++t) {
    for (size_t j = 0; j < K; ++j) {
      double top = kNegInf;
      uint8_t arg = 0;
      for (size_t i = 0; i < K; ++i) {
        const double s = best(t - 1, i) + params.EffectiveTransition(i, j);
        if (s > top) {
          top = s;
          arg = static_cast<uint8_t>(i);
        }
      }
      best(t, j) = top + emissions(t, j);
      back[t][j] = arg;
    }
  }
  double top = kNegInf;
  size_t last = 0;
  for (size_t j = 0; j < K; ++j) {
    const double s = best(n - 1, j) + params.end(j);
    if (s > top) {
      top = s;
      last = j;
    }
  }
  ViterbiResult result;
  result.score = top;
  result.tags.resize(n);
  for (size_t t = n; t-- > 0;) {
    result.tags[t] = static_cast<BioTag>(last);
    if (t > 0) last = back[t][last];
  }
  return result;
}

Matrix Marginals(const Matrix &emissions, const CrfParams &params) {
  CheckEmissions(emissions);
  const size_t n = emissions.rows();
  if (n == 0) throw ContractViolation("Marginals: empty sequence");
  const Matrix alpha = Forward(emissions, params);
  const Matrix beta = Backward(emissions, params);
  const double log_z = FinalLogZ(alpha, params);
  Matrix marginals(n, K);
  for (size_t t = 0; t < n; ++t) {
    for (size_t k = 0; k < K; ++k) {
      marginals(t, k) = std::exp(alpha(t, k) + beta(t, k) - log_z);
    }
  }
  return marginals;
}

CrfLoss CrfNllAndGrad(std::span<const LabeledSequence> batch,
                      const CrfParams &params, double l2) {
  if (batch.empty()) throw ContractViolation("CrfNllAndGrad: empty batch");
  const CrfMask &mask = params.mask();
  CrfLoss loss;
  loss.grad_emissions.reserve(batch.size());
  for (size_t b = 0; b < batch.size(); ++b) {
    const Matrix &e = batch[b].emissions;
    const TagSequence &gold = batch[b].gold;
    CheckEmissions(e);
    const size_t n = e.rows();
    if (n == 0 || gold.size() != n) {
      throw ContractViolation("CrfNllAndGrad: sequence " + std::to_string(b) +
                              " is empty or mislabeled");
    }
    const double gold_score = SequenceScore(e, params, gold);
    if (gold_score == kNegInf) {
      throw ContractViolation("CrfNllAndGrad: gold path of sequence " +
                              std::to_string(b) + " uses a masked transition");
    }
    const Matrix alpha = Forward(e, params);
    const Matrix beta = Backward(e, params);
    const double log_z = FinalLogZ(alpha, params);
    loss.nll += log_z - gold_score;

    Matrix grad_e(n, K);
    for (size_t t = 0; t < n; ++t) {
      for (size_t k = 0; k < K; ++k) {
        grad_e(t, k) = std::exp(alpha(t, k) + beta(t, k) - log_z);
      }
    }
    for (size_t k = 0; k < K; ++k) {
      loss.grad.start[k] += grad_e(0, k);
      loss.grad.end[k] += grad_e(n - 1, k);
    }
    for (size_t t = 1; t < n; ++t) {
      for (size_t i = 0; i < K; ++i) {
        for (size_t j = 0; j < K; ++j) {
          const double tr = params.EffectiveTransition(i, j);
          if (tr == kNegInf) continue;
          loss.grad.transitions(i, j) +=
              std::exp(alpha(t - 1, i) + tr + e(t, j) + beta(t, j) - log_z);
        }
      }
    }
    // Empirical counts.
    loss.grad.start[TagIndex(gold[0])] -= 1.0;
    loss.grad.end[TagIndex(gold.back())] -= 1.0;
    for (size_t t = 0; t < n; ++t) {
      grad_e(t, TagIndex(gold[t])) -= 1.0;
      if (t > 0) loss.grad.transitions(TagIndex(gold[t - 1]), TagIndex(gold[t])) -= 1.0;
    }
    loss.grad_emissions.push_back(std::move(grad_e));
  }
  if (l2 > 0.0) {
    double norm = 0.0;
    for (size_t i = 0; i < K; ++i) {
      for (size_t j = 0; j < K; ++j) {
        if (mask.transition[i][j]) continue;
        norm += params.transition(i, j) * params.transition(i, j);
        loss.grad.transitions(i, j) += l2 * params.transition(i, j);
      }
      if (!mask.start[i]) {
        norm += params.start(i) * params.start(i);
        loss.grad.start[i] += l2 * params.start(i);
      }
      norm += params.end(i) * params.end(i);
      loss.grad.end[i] += l2 * params.end(i);
    }
    loss.nll += 0.5 * l2 * norm;
  }
  for (size_t i = 0; i < K; ++i) {
    if (mask.start[i]) loss.grad.start[i] = 0.0;
    for (size_t j = 0; j < K; ++j) {
      if (mask.transition[i][j]) loss.grad.transitions(i, j) = 0.0;
    }
  }
  return loss;
}

}  // namespace propspan
