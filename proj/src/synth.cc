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

#include "propspan/synth.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "propspan/errors.h"
#include "propspan/tc_rules.h"
#include "propspan/utf8.h"
#include "random_util.h"

namespace propspan {

namespace fs = std::filesystem;

namespace {

// Pseudo-words from disjoint consonant inventories, so planted words never
// collide with filler words.
class WordMaker {
 public:
  WordMaker(std::string consonants, std::mt19937_64 &rng, const StopwordList *stopwords)
      : consonants_(std::move(consonants)), rng_(rng), stopwords_(stopwords) {}

  std::string Fresh() {
    static constexpr char kVowels[] = "aeiou";
    while (true) {
      std::string w;
      const size_t syllables = 2 + UniformIndex(rng_, 2);
      for (size_t s = 0; s < syllables; ++s) {
        w.push_back(consonants_[UniformIndex(rng_, consonants_.size())]);
        w.push_back(kVowels[UniformIndex(rng_, 5)]);
      }
      if (stopwords_ && stopwords_->Contains(w)) continue;
      if (used_.insert(w).second) return w;
    }
  }

 private:
  std::string consonants_;
  std::mt19937_64 &rng_;
  const StopwordList *stopwords_;
  std::set<std::string> used_;
};

std::string Join(const std::vector<std::string> &words) {
  std::string out;
  for (const std::string &w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

std::string Capitalized(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

// Builds ASCII article text while tracking character offsets.
class TextBuilder {
 public:
  size_t size() const { return text_.size(); }
  void Append(const std::string &s) { text_ += s; }
  // Separator before a new sentence.
  void Separate() {
    if (!text_.empty() && text_.back() != '\n') text_ += ' ';
  }
  std::u32string Finish() const { return DecodeUtf8(text_); }

 private:
  std::string text_;
};

struct PlacedSentence {
  CharSpan span;
  size_t phrase_start = 0;  // offset of the phrase's first word
};

// Appends "Filler ... <phrase> ... filler." and returns the phrase span.
PlacedSentence AppendSentence(TextBuilder &text, const std::vector<std::string> &filler,
                              std::mt19937_64 &rng, const std::string &phrase, bool quoted) {
  const size_t before = 2 + UniformIndex(rng, 5);
  const size_t after = 1 + UniformIndex(rng, 5);
  std::vector<std::string> words;
  for (size_t i = 0; i < before; ++i) words.push_back(filler[UniformIndex(rng, filler.size())]);
  words[0] = Capitalized(words[0]);
  text.Separate();
  text.Append(Join(words) + " ");
  PlacedSentence placed;
  placed.span.start = text.size();
  if (quoted) text.Append("\"");
  placed.phrase_start = text.size();
  text.Append(phrase);
  if (quoted) text.Append("\"");
  placed.span.end = text.size();
  words.clear();
  for (size_t i = 0; i < after; ++i) words.push_back(filler[UniformIndex(rng, filler.size())]);
  text.Append(" " + Join(words) + ".");
  return placed;
}

void AppendFillerSentence(TextBuilder &text, const std::vector<std::string> &filler,
                          std::mt19937_64 &rng) {
  const size_t n = 5 + UniformIndex(rng, 8);
  std::vector<std::string> words;
  for (size_t i = 0; i < n; ++i) {
    std::string w = filler[UniformIndex(rng, filler.size())];
    if (i + 1 < n && UnitUniform(rng) < 0.1) w += ",";
    words.push_back(std::move(w));
  }
  words[0] = Capitalized(words[0]);
  text.Separate();
  text.Append(Join(words) + ".");
}

std::vector<std::string> MakePool(WordMaker &maker, size_t n) {
  std::vector<std::string> pool;
  for (size_t i = 0; i < n; ++i) pool.push_back(maker.Fresh());
  return pool;
}

std::string RandomPhrase(const std::vector<std::string> &pool, std::mt19937_64 &rng,
                         size_t min_words, size_t max_words) {
  const size_t n = min_words + UniformIndex(rng, max_words - min_words + 1);
  std::vector<std::string> words;
  for (size_t i = 0; i < n; ++i) words.push_back(pool[UniformIndex(rng, pool.size())]);
  return Join(words);
}

// --- TC probability design ---------------------------------------------------

struct TcIds {
  TechniqueId repetition, causal, loaded, doubt;
  std::vector<TechniqueId> non_repetition;
};

// Probability vector with the given entries pinned and the remaining mass
// spread over the other techniques with small random jitter.
std::vector<double> DesignProbs(size_t k, const std::vector<std::pair<TechniqueId, double>> &pinned,
                                std::mt19937_64 &rng) {
  std::vector<double> p(k, 0.0);
  std::vector<bool> fixed(k, false);
  double used = 0.0;
  for (const auto &[t, v] : pinned) {
    p[t] = v;
    fixed[t] = true;
    used += v;
  }
  std::vector<double> weights(k, 0.0);
  double total = 0.0;
  for (size_t i = 0; i < k; ++i) {
    if (fixed[i]) continue;
    weights[i] = 0.5 + UnitUniform(rng);
    total += weights[i];
  }
  const double rest = std::max(0.0, 1.0 - used);
  for (size_t i = 0; i < k; ++i) {
    if (!fixed[i] && total > 0.0) p[i] = rest * weights[i] / total;
  }
  return p;
}

// The weaker member: the designed vector blended with random noise.
std::vector<double> NoisyCopy(const std::vector<double> &p, std::mt19937_64 &rng) {
  std::vector<double> q(p.size());
  double total = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    q[i] = 0.65 * p[i] + 0.35 * UnitUniform(rng) * 2.0 / static_cast<double>(p.size());
    total += q[i];
  }
  for (double &v : q) v /= total;
  return q;
}

TechniqueId PickOther(const std::vector<TechniqueId> &pool, std::mt19937_64 &rng,
                      std::initializer_list<TechniqueId> exclude) {
  while (true) {
    const TechniqueId t = pool[UniformIndex(rng, pool.size())];
    if (std::find(exclude.begin(), exclude.end(), t) == exclude.end()) return t;
  }
}

struct SeenPhrase {
  std::string text;
  TechniqueId technique;
};

class TcSplitBuilder {
 public:
  TcSplitBuilder(SynthTcSplit &split, const TcIds &ids, size_t k, std::mt19937_64 &rng,
                 const std::vector<std::string> &filler, const std::vector<std::string> &span_pool,
                 bool with_members)
      : split_(split), ids_(ids), k_(k), rng_(rng), filler_(filler), span_pool_(span_pool),
        with_members_(with_members) {
    if (with_members_) split_.members.resize(2);
  }

  void StartArticle(const std::string &id) {
    id_ = id;
    text_ = TextBuilder();
    pending_.clear();
  }

  void Filler() { AppendFillerSentence(text_, filler_, rng_); }

  CharSpan Place(const std::string &phrase) {
    return AppendSentence(text_, filler_, rng_, phrase, false).span;
  }

  void AddRow(CharSpan span, TechniqueId gold, std::vector<double> designed) {
    pending_.push_back({span, gold, std::move(designed)});
  }

  void FinishArticle() {
    split_.articles.push_back({id_, text_.Finish()});
    for (Pending &p : pending_) {
      TcRow row;
      row.ordinal = split_.rows.size();
      row.article_id = id_;
      row.span = p.span;
      row.technique = p.gold;
      split_.rows.push_back(row);
      if (with_members_) {
        split_.members[0].push_back(NoisyCopy(p.designed, rng_));
        split_.members[1].push_back(std::move(p.designed));
      }
    }
  }

  std::string FreshPhrase() { return RandomPhrase(span_pool_, rng_, 2, 4); }
  std::vector<double> Probs(const std::vector<std::pair<TechniqueId, double>> &pinned) {
    return DesignProbs(k_, pinned, rng_);
  }
  std::mt19937_64 &rng() { return rng_; }

 private:
  struct Pending {
    CharSpan span;
    TechniqueId gold;
    std::vector<double> designed;
  };
  SynthTcSplit &split_;
  const TcIds &ids_;
  size_t k_;
  std::mt19937_64 &rng_;
  const std::vector<std::string> &filler_;
  const std::vector<std::string> &span_pool_;
  bool with_members_;
  std::string id_;
  TextBuilder text_;
  std::vector<Pending> pending_;
};

// One outer phrase containing an inner phrase, both labeled.
std::pair<CharSpan, CharSpan> PlaceNested(TcSplitBuilder &b, const std::string &inner) {
  const std::string head = b.FreshPhrase();
  const std::string tail = b.FreshPhrase();
  const CharSpan outer = b.Place(head + " " + inner + " " + tail);
  const size_t inner_start = outer.start + head.size() + 1;
  return {outer, CharSpan{inner_start, inner_start + inner.size()}};
}

void FinalizeMultiplicity(std::vector<TcRow> &rows) {
  std::map<std::pair<std::string, CharSpan>, size_t> counts;
  for (const TcRow &r : rows) ++counts[{r.article_id, r.span}];
  for (TcRow &r : rows) r.multiplicity = counts[{r.article_id, r.span}];
}

}  // namespace

SynthSiCorpus GenerateSiCorpus(size_t num_articles, uint64_t seed) {
  std::mt19937_64 rng(seed);
  WordMaker filler_maker("bdfgklmnprstv", rng, nullptr);
  WordMaker planted_maker("zxqjwhc", rng, nullptr);
  const std::vector<std::string> filler = MakePool(filler_maker, 300);
  std::vector<std::string> lexicon;
  for (size_t i = 0; i < 40; ++i) {
    const size_t n = 1 + UniformIndex(rng, 4);
    std::vector<std::string> words;
    for (size_t w = 0; w < n; ++w) words.push_back(planted_maker.Fresh());
    lexicon.push_back(Join(words));
  }
  SynthSiCorpus corpus;
  for (size_t a = 0; a < num_articles; ++a) {
    const std::string id = std::to_string(100000 + a);
    TextBuilder text;
    std::vector<CharSpan> spans;
    const size_t sentences = 6 + UniformIndex(rng, 5);
    for (size_t s = 0; s < sentences; ++s) {
      if (s > 0 && s % 3 == 0) text.Append("\n");
      if (UnitUniform(rng) < 0.5) {
        const bool quoted = UnitUniform(rng) < 0.2;
        spans.push_back(AppendSentence(text, filler, rng, lexicon[UniformIndex(rng, lexicon.size())],
                                       quoted)
                            .span);
      } else {
        AppendFillerSentence(text, filler, rng);
      }
    }
    corpus.articles.push_back({id, text.Finish()});
    if (!spans.empty()) corpus.gold[id] = std::move(spans);
  }
  return corpus;
}

SynthTcData GenerateTcData(size_t articles_per_split, uint64_t seed,
                           const StopwordList &stopwords) {
  SynthTcData data;
  data.techniques = TechniqueSet::Default();
  const TechniqueSet &ts = data.techniques;
  TcIds ids{*ts.Find(kRepetitionTechnique), *ts.Find("Causal_Oversimplification"),
            *ts.Find("Loaded_Language"), *ts.Find("Doubt"), {}};
  for (size_t i = 0; i < ts.size(); ++i) {
    if (static_cast<TechniqueId>(i) != ids.repetition) ids.non_repetition.push_back(i);
  }
  const size_t k = ts.size();

  std::mt19937_64 rng(seed);
  WordMaker filler_maker("bdfgklmnprstv", rng, &stopwords);
  WordMaker span_maker("zxqjwhc", rng, &stopwords);
  const std::vector<std::string> filler = MakePool(filler_maker, 300);
  const std::vector<std::string> span_pool = MakePool(span_maker, 400);

  std::vector<SeenPhrase> seen_bank;
  for (size_t i = 0; i < 30; ++i) {
    seen_bank.push_back({RandomPhrase(span_pool, rng, 2, 3),
                         ids.non_repetition[UniformIndex(rng, ids.non_repetition.size())]});
  }

  // Training articles: labeled spans only, feeding memory and nesting tables.
  {
    TcSplitBuilder b(data.train, ids, k, rng, filler, span_pool, false);
    for (size_t a = 0; a < articles_per_split; ++a) {
      b.StartArticle(std::to_string(100000 + a));
      for (int i = 0; i < 4; ++i) {
        b.AddRow(b.Place(b.FreshPhrase()),
                 ids.non_repetition[UniformIndex(rng, ids.non_repetition.size())], {});
        b.Filler();
      }
      for (size_t i = 0; i < 2; ++i) {
        const SeenPhrase &seen = seen_bank[(2 * a + i) % seen_bank.size()];
        b.AddRow(b.Place(seen.text), seen.technique, {});
      }
      const auto [outer, inner] = PlaceNested(b, b.FreshPhrase());
      b.AddRow(outer, ids.causal, {});
      b.AddRow(inner, ids.loaded, {});
      b.FinishArticle();
    }
  }

  // Only bank phrases that occurred in training count as seen.
  const size_t seen_covered = std::min(seen_bank.size(), 2 * articles_per_split);
  auto build_scored = [&](SynthTcSplit &split, size_t id_base) {
    TcSplitBuilder b(split, ids, k, rng, filler, span_pool, true);
    for (size_t a = 0; a < articles_per_split; ++a) {
      b.StartArticle(std::to_string(id_base + a));
      // Plain spans; about one in twenty is misclassified beyond repair.
      for (int i = 0; i < 4; ++i) {
        const TechniqueId gold = ids.non_repetition[UniformIndex(rng, ids.non_repetition.size())];
        const CharSpan span = b.Place(b.FreshPhrase());
        if (UnitUniform(rng) < 0.05) {
          const TechniqueId wrong = PickOther(ids.non_repetition, rng, {gold});
          b.AddRow(span, gold, b.Probs({{wrong, 0.55}, {gold, 0.2}}));
        } else {
          b.AddRow(span, gold, b.Probs({{gold, 0.55 + 0.25 * UnitUniform(rng)}}));
        }
        b.Filler();
      }
      // A phrase repeated three times, scored as some other technique.
      const std::string repeated = b.FreshPhrase();
      for (int i = 0; i < 3; ++i) {
        const TechniqueId wrong = PickOther(ids.non_repetition, rng, {});
        b.AddRow(b.Place(repeated), ids.repetition,
                 b.Probs({{wrong, 0.5}, {ids.repetition, 0.1}}));
        b.Filler();
      }
      // A span seen in training, its technique ranked second.
      const SeenPhrase &seen = seen_bank[UniformIndex(rng, seen_covered)];
      const TechniqueId seen_wrong = PickOther(ids.non_repetition, rng, {seen.technique});
      b.AddRow(b.Place(seen.text), seen.technique,
               b.Probs({{seen_wrong, 0.42}, {seen.technique, 0.3}}));
      // A unique span with spurious Repetition mass.
      const TechniqueId unique_gold = ids.non_repetition[UniformIndex(rng, ids.non_repetition.size())];
      b.AddRow(b.Place(b.FreshPhrase()), unique_gold,
               b.Probs({{ids.repetition, 0.45}, {unique_gold, 0.35}}));
      b.Filler();
      // A two-label span, repeated once per label.
      const TechniqueId first = ids.non_repetition[UniformIndex(rng, ids.non_repetition.size())];
      const TechniqueId second = PickOther(ids.non_repetition, rng, {first});
      const CharSpan multi = b.Place(b.FreshPhrase());
      const std::vector<double> multi_probs = b.Probs({{first, 0.5}, {second, 0.3}});
      b.AddRow(multi, first, multi_probs);
      b.AddRow(multi, second, multi_probs);
      // Nested spans; the subspan's top label forms an unseen nesting.
      const auto [outer, inner] = PlaceNested(b, b.FreshPhrase());
      b.AddRow(outer, ids.causal, b.Probs({{ids.causal, 0.7}}));
      b.AddRow(inner, ids.loaded, b.Probs({{ids.doubt, 0.4}, {ids.loaded, 0.35}}));
      b.FinishArticle();
    }
  };
  build_scored(data.dev, 200000);
  build_scored(data.test, 300000);
  FinalizeMultiplicity(data.train.rows);
  FinalizeMultiplicity(data.dev.rows);
  FinalizeMultiplicity(data.test.rows);
  return data;
}

namespace {

void WriteArticles(const fs::path &dir, const std::vector<Article> &articles) {
  fs::create_directories(dir);
  for (const Article &a : articles) {
    std::ofstream out(dir / ("article" + a.id + ".txt"), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write article " + a.id + " under " + dir.string());
    out << EncodeUtf8(a.text);
  }
}

void WriteMemberProbs(const fs::path &dir, const SynthTcSplit &split) {
  for (size_t m = 0; m < split.members.size(); ++m) {
    std::vector<TcProbRecord> records;
    for (const TcRow &r : split.rows) {
      records.push_back({r.article_id, r.span, r.ordinal, split.members[m][r.ordinal]});
    }
    SaveTcProbs((dir / ("probs" + std::to_string(m + 1) + ".jsonl")).string(), records);
  }
}

}  // namespace

void WriteSynthDataset(const std::string &dir, size_t num_articles, uint64_t seed,
                       const StopwordList &stopwords) {
  const fs::path root(dir);
  const SynthSiCorpus si = GenerateSiCorpus(num_articles, seed);
  WriteArticles(root / "si" / "articles", si.articles);
  SaveSiLabels((root / "si" / "gold.tsv").string(), si.gold);

  const size_t per_split = std::max<size_t>(2, num_articles / 2);
  const SynthTcData tc = GenerateTcData(per_split, seed, stopwords);
  const TechniqueSet &ts = tc.techniques;
  WriteArticles(root / "tc" / "train" / "articles", tc.train.articles);
  SaveTcRows((root / "tc" / "train" / "labels.tsv").string(), tc.train.rows, ts);
  WriteArticles(root / "tc" / "dev" / "articles", tc.dev.articles);
  SaveTcRows((root / "tc" / "dev" / "labels.tsv").string(), tc.dev.rows, ts);
  WriteMemberProbs(root / "tc" / "dev", tc.dev);
  WriteArticles(root / "tc" / "test" / "articles", tc.test.articles);
  SaveTcRows((root / "tc" / "test" / "gold.tsv").string(), tc.test.rows, ts);
  std::vector<TcRow> unlabeled = tc.test.rows;
  for (TcRow &r : unlabeled) r.technique.reset();
  SaveTcRows((root / "tc" / "test" / "rows.tsv").string(), unlabeled, ts);
  WriteMemberProbs(root / "tc" / "test", tc.test);
}

}  // namespace propspan
