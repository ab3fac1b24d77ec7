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

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "propspan/crf.h"
#include "propspan/errors.h"
#include "random_util.h"

namespace propspan {

namespace {

constexpr size_t K = kCrfTags;
constexpr const char *kMagic = "propspan-crf";
constexpr int kFormatVersion = 1;

double HeldOutNll(std::span<const LabeledSequence> data, const CrfParams &params) {
  double total = 0.0;
  for (const LabeledSequence &s : data) {
    total += LogPartition(s.emissions, params) - SequenceScore(s.emissions, params, s.gold);
  }
  return total;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double ParseDouble(const std::string &field, const std::string &what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError(what + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

CrfParams TrainCrf(std::span<const LabeledSequence> train, const CrfTrainConfig &config,
                   std::span<const LabeledSequence> heldout) {
  if (train.empty()) throw ConfigError("TrainCrf: empty training set");
  if (!(config.learning_rate > 0.0) || config.epochs < 1 || config.l2 < 0.0) {
    throw ConfigError("TrainCrf: invalid configuration");
  }
  CrfParams params(config.mask);
  std::mt19937_64 rng(config.seed);
  for (size_t i = 0; i < K; ++i) {
    for (size_t j = 0; j < K; ++j) {
      params.transition(i, j) = SymmetricUniform(rng, config.init_scale);
    }
  }
  for (size_t i = 0; i < K; ++i) params.start(i) = SymmetricUniform(rng, config.init_scale);
  for (size_t i = 0; i < K; ++i) params.end(i) = SymmetricUniform(rng, config.init_scale);

  const double step = config.learning_rate / static_cast<double>(train.size());
  std::optional<CrfParams> best;
  double best_nll = std::numeric_limits<double>::infinity();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const CrfLoss loss = CrfNllAndGrad(train, params, config.l2);
    if (!std::isfinite(loss.nll)) {
      throw NumericalError("TrainCrf: non-finite objective at epoch " +
                           std::to_string(epoch));
    }
    for (size_t i = 0; i < K; ++i) {
      for (size_t j = 0; j < K; ++j) {
        params.transition(i, j) -= step * loss.grad.transitions(i, j);
      }
      params.start(i) -= step * loss.grad.start[i];
      params.end(i) -= step * loss.grad.end[i];
    }
    if (!heldout.empty()) {
      const double nll = HeldOutNll(heldout, params);
      if (!std::isfinite(nll)) {
        throw NumericalError("TrainCrf: non-finite held-out NLL at epoch " +
                             std::to_string(epoch));
      }
      if (nll < best_nll) {
        best_nll = nll;
        best = params;
      }
    }
  }
  return best ? *best : params;
}

void WriteCrfParams(std::ostream &out, const CrfParams &params) {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "tags";
  for (size_t k = 0; k < K; ++k) out << ' ' << BioTagName(static_cast<BioTag>(k));
  out << "\nstart";
  for (size_t k = 0; k < K; ++k) out << ' ' << FormatDouble(params.start(k));
  out << "\nend";
  for (size_t k = 0; k < K; ++k) out << ' ' << FormatDouble(params.end(k));
  out << "\ntransitions\n";
  for (size_t i = 0; i < K; ++i) {
    for (size_t j = 0; j < K; ++j) {
      out << (j ? " " : "") << FormatDouble(params.transition(i, j));
    }
    out << '\n';
  }
  out << "start_forbidden";
  for (size_t k = 0; k < K; ++k) out << ' ' << (params.mask().start[k] ? 1 : 0);
  out << "\nforbidden\n";
  for (size_t i = 0; i < K; ++i) {
    for (size_t j = 0; j < K; ++j) {
      out << (j ? " " : "") << (params.mask().transition[i][j] ? 1 : 0);
    }
    out << '\n';
  }
}

CrfParams ReadCrfParams(std::istream &in, const std::string &what) {
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  size_t pos = 0;
  auto next = [&]() -> const std::string & {
    if (pos >= words.size()) throw FormatError(what + ": truncated CRF parameter file");
    return words[pos++];
  };
  auto expect = [&](const std::string &keyword) {
    if (next() != keyword) {
      throw FormatError(what + ": expected '" + keyword + "' in CRF parameter file");
    }
  };
  expect(kMagic);
  if (next() != std::to_string(kFormatVersion)) {
    throw FormatError(what + ": unsupported CRF parameter file version");
  }
  expect("tags");
  for (size_t k = 0; k < K; ++k) expect(BioTagName(static_cast<BioTag>(k)));
  double start[K], end[K], trans[K][K];
  expect("start");
  for (size_t k = 0; k < K; ++k) start[k] = ParseDouble(next(), what);
  expect("end");
  for (size_t k = 0; k < K; ++k) end[k] = ParseDouble(next(), what);
  expect("transitions");
  for (size_t i = 0; i < K; ++i) {
    for (size_t j = 0; j < K; ++j) trans[i][j] = ParseDouble(next(), what);
  }
  auto flag = [&]() {
    const std::string &w = next();
    if (w != "0" && w != "1") throw FormatError(what + ": mask entries must be 0 or 1");
    return w == "1";
  };
  CrfMask mask;
  expect("start_forbidden");
  for (size_t k = 0; k < K; ++k) mask.start[k] = flag();
  expect("forbidden");
  for (size_t i = 0; i < K; ++i) {
    for (size_t j = 0; j < K; ++j) mask.transition[i][j] = flag();
  }
  if (pos != words.size()) throw FormatError(what + ": trailing data in CRF parameter file");
  CrfParams params(mask);
  for (size_t i = 0; i < K; ++i) {
    params.start(i) = start[i];
    params.end(i) = end[i];
    for (size_t j = 0; j < K; ++j) params.transition(i, j) = trans[i][j];
  }
  return params;
}

void SaveCrfParams(const std::string &path, const CrfParams &params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  WriteCrfParams(out, params);
  if (!out) throw IoError("error writing " + path);
}

CrfParams LoadCrfParams(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return ReadCrfParams(in, path);
}

}  // namespace propspan
