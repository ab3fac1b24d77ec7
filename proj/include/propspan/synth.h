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

#ifndef PROPSPAN_SYNTH_H_
#define PROPSPAN_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "propspan/corpus.h"
#include "propspan/textnorm.h"

namespace propspan {

// Synthetic corpora with planted signal, for end-to-end checks and demos.

// Articles of pseudo-word sentences. Gold spans are phrases drawn from a
// fixed planted lexicon whose words never occur outside spans; about a
// fifth of them are quoted, with the quotes inside the gold span.
struct SynthSiCorpus {
  std::vector<Article> articles;
  SiLabels gold;
};

SynthSiCorpus GenerateSiCorpus(size_t num_articles, uint64_t seed);

// TC data in three article sets (training, development, test). Test and
// development rows come with two members' probability tables whose errors
// are of the kinds the rule cascade targets: repeated phrases scored as
// another technique, spans seen in training with the right label ranked
// second, spurious Repetition mass on unique spans, two-label groups, and
// subspans whose top label forms an unseen nesting.
struct SynthTcSplit {
  std::vector<Article> articles;
  std::vector<TcRow> rows;  // labeled (gold)
  // members[m][ordinal]
  std::vector<std::vector<std::vector<double>>> members;
};

struct SynthTcData {
  TechniqueSet techniques;
  SynthTcSplit train;  // rows only; members empty
  SynthTcSplit dev;
  SynthTcSplit test;
};

SynthTcData GenerateTcData(size_t articles_per_split, uint64_t seed,
                           const StopwordList &stopwords);

// Writes a demo layout under `dir`; see README for the file list.
void WriteSynthDataset(const std::string &dir, size_t num_articles, uint64_t seed,
                       const StopwordList &stopwords);

}  // namespace propspan

#endif  // PROPSPAN_SYNTH_H_
