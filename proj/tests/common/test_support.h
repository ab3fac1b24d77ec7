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

#ifndef PROPSPAN_TESTS_COMMON_TEST_SUPPORT_H_
#define PROPSPAN_TESTS_COMMON_TEST_SUPPORT_H_

// Independent oracles and generators shared by the unit and acceptance
// suites. Nothing here calls into the code under test except for plain
// accessors and data types.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "propspan/corpus.h"
#include "propspan/crf.h"
#include "propspan/emissions.h"
#include "propspan/matrix.h"

namespace propspan::testing {

inline std::string SourcePath(const std::string &relative) {
  return std::string(PROPSPAN_SOURCE_DIR) + "/" + relative;
}

inline std::string ReadAll(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteAll(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("propspan_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  std::string path() const { return path_.string(); }
  std::string operator/(const std::string &name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// --- generators --------------------------------------------------------------

inline double Uniform(std::mt19937_64 &rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline size_t Index(std::mt19937_64 &rng, size_t n) { return static_cast<size_t>(rng() % n); }

inline Matrix RandomMatrix(std::mt19937_64 &rng, size_t rows, size_t cols, double scale) {
  Matrix m(rows, cols);
  for (double &v : m.values()) v = Uniform(rng, -scale, scale);
  return m;
}

inline CrfParams RandomCrfParams(std::mt19937_64 &rng, const CrfMask &mask, double scale) {
  CrfParams p(mask);
  for (size_t i = 0; i < kCrfTags; ++i) {
    p.start(i) = Uniform(rng, -scale, scale);
    p.end(i) = Uniform(rng, -scale, scale);
    for (size_t j = 0; j < kCrfTags; ++j) p.transition(i, j) = Uniform(rng, -scale, scale);
  }
  return p;
}

inline std::vector<double> RandomSimplex(std::mt19937_64 &rng, size_t k) {
  std::vector<double> p(k);
  double total = 0.0;
  for (double &v : p) {
    v = Uniform(rng, 0.01, 1.0);
    total += v;
  }
  for (double &v : p) v /= total;
  return p;
}

// Tokens laid out left to right with random gaps; spans are random
// character intervals, disjoint and sorted, that may cut through tokens.
struct TokenLayout {
  std::vector<Token> tokens;
  size_t length = 0;
};

inline TokenLayout RandomTokens(std::mt19937_64 &rng, size_t count) {
  TokenLayout layout;
  size_t pos = Index(rng, 3);
  for (size_t i = 0; i < count; ++i) {
    const size_t len = 1 + Index(rng, 5);
    layout.tokens.push_back({"t", {pos, pos + len}});
    pos += len + Index(rng, 3);
  }
  layout.length = pos + 1;
  return layout;
}

inline std::vector<CharSpan> RandomDisjointSpans(std::mt19937_64 &rng, size_t length,
                                                 size_t max_spans) {
  std::set<size_t> cuts;
  const size_t want = 2 * Index(rng, max_spans + 1);
  for (size_t i = 0; i < want * 2 && cuts.size() < want; ++i) cuts.insert(Index(rng, length + 1));
  std::vector<size_t> points(cuts.begin(), cuts.end());
  std::vector<CharSpan> spans;
  for (size_t i = 0; i + 1 < points.size(); i += 2) {
    if (points[i] < points[i + 1]) spans.push_back({points[i], points[i + 1]});
  }
  return spans;
}

// --- BIO oracle ---------------------------------------------------------------

inline size_t FindRoot(std::vector<size_t> &parent, size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

// Spans that overlap in characters are joined, each union is widened to the
// tokens it touches, and widened intervals sharing a token are joined again.
inline std::vector<CharSpan> TokenSnappedUnion(const std::vector<Token> &tokens,
                                               const std::vector<CharSpan> &spans) {
  const size_t n = spans.size();
  std::vector<size_t> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = i;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (std::min(spans[i].end, spans[j].end) > std::max(spans[i].start, spans[j].start)) {
        parent[FindRoot(parent, i)] = FindRoot(parent, j);
      }
    }
  }
  std::map<size_t, CharSpan> unions;
  for (size_t i = 0; i < n; ++i) {
    const size_t r = FindRoot(parent, i);
    auto [it, inserted] = unions.emplace(r, spans[i]);
    if (!inserted) {
      it->second.start = std::min(it->second.start, spans[i].start);
      it->second.end = std::max(it->second.end, spans[i].end);
    }
  }
  std::vector<std::pair<size_t, size_t>> ranges;  // token index ranges
  for (const auto &[root, u] : unions) {
    size_t first = tokens.size(), last = 0;
    for (size_t t = 0; t < tokens.size(); ++t) {
      const CharSpan &tok = tokens[t].span;
      if (std::min(tok.end, u.end) > std::max(tok.start, u.start)) {
        first = std::min(first, t);
        last = std::max(last, t);
      }
    }
    if (first < tokens.size()) ranges.push_back({first, last});
  }
  const size_t m = ranges.size();
  std::vector<size_t> rparent(m);
  for (size_t i = 0; i < m; ++i) rparent[i] = i;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      if (std::min(ranges[i].second, ranges[j].second) >=
          std::max(ranges[i].first, ranges[j].first)) {
        rparent[FindRoot(rparent, i)] = FindRoot(rparent, j);
      }
    }
  }
  std::map<size_t, std::pair<size_t, size_t>> joined;
  for (size_t i = 0; i < m; ++i) {
    auto [it, inserted] = joined.emplace(FindRoot(rparent, i), ranges[i]);
    if (!inserted) {
      it->second.first = std::min(it->second.first, ranges[i].first);
      it->second.second = std::max(it->second.second, ranges[i].second);
    }
  }
  std::vector<CharSpan> out;
  for (const auto &[root, r] : joined) {
    out.push_back({tokens[r.first].span.start, tokens[r.second].span.end});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Random spans that may overlap, nest or touch one another.
inline std::vector<CharSpan> RandomSpans(std::mt19937_64 &rng, size_t length, size_t max_spans) {
  std::vector<CharSpan> spans;
  const size_t n = Index(rng, max_spans + 1);
  for (size_t i = 0; i < n; ++i) {
    const size_t a = Index(rng, length), b = Index(rng, length);
    if (a != b) spans.push_back({std::min(a, b), std::max(a, b)});
  }
  return spans;
}

// --- CRF oracle ----------------------------------------------------------------

// Score of a tag path computed directly from the definition; -inf when the
// path uses a masked start or transition.
inline double BrutePathScore(const Matrix &e, const CrfParams &p, const std::vector<size_t> &y) {
  const double ninf = -std::numeric_limits<double>::infinity();
  if (p.mask().start[y[0]]) return ninf;
  double s = p.start(y[0]) + p.end(y.back());
  for (size_t t = 0; t < y.size(); ++t) {
    s += e(t, y[t]);
    if (t > 0) {
      if (p.mask().transition[y[t - 1]][y[t]]) return ninf;
      s += p.transition(y[t - 1], y[t]);
    }
  }
  return s;
}

inline void ForEachPath(size_t length, const std::function<void(const std::vector<size_t> &)> &fn) {
  std::vector<size_t> y(length, 0);
  while (true) {
    fn(y);
    size_t t = 0;
    while (t < length && ++y[t] == kCrfTags) y[t++] = 0;
    if (t == length) return;
  }
}

struct BruteCrf {
  double log_z = 0.0;
  double best_score = 0.0;
  std::vector<size_t> best;  // lexicographically smallest among ties
  Matrix marginals;
};

inline BruteCrf BruteForceCrf(const Matrix &e, const CrfParams &p) {
  const size_t T = e.rows();
  std::vector<std::vector<size_t>> paths;
  std::vector<double> scores;
  ForEachPath(T, [&](const std::vector<size_t> &y) {
    paths.push_back(y);
    scores.push_back(BrutePathScore(e, p, y));
  });
  BruteCrf out;
  const double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - mx);
  out.log_z = mx + std::log(sum);
  out.best_score = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < paths.size(); ++i) {
    if (scores[i] > out.best_score ||
        (scores[i] == out.best_score && paths[i] < out.best)) {
      out.best_score = scores[i];
      out.best = paths[i];
    }
  }
  out.marginals = Matrix(T, kCrfTags);
  for (size_t i = 0; i < paths.size(); ++i) {
    const double w = std::exp(scores[i] - out.log_z);
    for (size_t t = 0; t < T; ++t) out.marginals(t, paths[i][t]) += w;
  }
  return out;
}

// --- finite differences -------------------------------------------------------

inline double CentralDifference(const std::function<double()> &f, double &x, double h = 1e-5) {
  const double saved = x;
  x = saved + h;
  const double up = f();
  x = saved - h;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * h);
}

inline double RelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1.0, std::max(std::abs(analytic), std::abs(numeric)));
}

// --- emitter toy data ---------------------------------------------------------

// Lexicon words are always a single-token span; nothing else is.
inline std::vector<TaggedSentence> ToyTaggedCorpus() {
  const std::vector<std::u32string> texts = {
      U"they said zorg twice", U"the vex plan failed", U"zorg is here", U"no vex today",
      U"plain words only here", U"we met quib yesterday"};
  std::vector<TaggedSentence> corpus;
  for (const auto &text : texts) {
    TaggedSentence s;
    s.tokens = Tokenize(text);
    for (const Token &t : s.tokens) {
      const bool lex = t.text == "zorg" || t.text == "vex" || t.text == "quib";
      s.tags.push_back(lex ? BioTag::kBegin : BioTag::kO);
    }
    corpus.push_back(std::move(s));
  }
  return corpus;
}

// --- scorer oracles -----------------------------------------------------------

struct SiOracleScore {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Overlap credit counted one character at a time.
inline SiOracleScore BruteForceSi(const SiLabels &pred, const SiLabels &gold) {
  auto credit = [](const SiLabels &from, const SiLabels &against) {
    double total = 0.0;
    size_t count = 0;
    for (const auto &[id, spans] : from) {
      auto it = against.find(id);
      for (const CharSpan &s : spans) {
        ++count;
        if (it == against.end()) continue;
        for (const CharSpan &t : it->second) {
          size_t shared = 0;
          for (size_t c = s.start; c < s.end; ++c) shared += (c >= t.start && c < t.end);
          total += static_cast<double>(shared) / static_cast<double>(s.end - s.start);
        }
      }
    }
    return std::pair<double, size_t>(total, count);
  };
  const auto [pc, ps] = credit(pred, gold);
  const auto [rc, gs] = credit(gold, pred);
  SiOracleScore s;
  s.precision = ps == 0 ? (gs == 0 ? 1.0 : 0.0) : pc / static_cast<double>(ps);
  s.recall = gs == 0 ? (ps == 0 ? 1.0 : 0.0) : rc / static_cast<double>(gs);
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0;
  return s;
}

// Best number of agreements over all one-to-one assignments of predicted
// labels to gold labels within a group.
inline size_t ExhaustiveMatches(std::vector<TechniqueId> pred, const std::vector<TechniqueId> &gold) {
  std::sort(pred.begin(), pred.end());
  size_t best = 0;
  do {
    size_t agree = 0;
    for (size_t i = 0; i < pred.size(); ++i) agree += pred[i] == gold[i];
    best = std::max(best, agree);
  } while (std::next_permutation(pred.begin(), pred.end()));
  return best;
}

}  // namespace propspan::testing

#endif  // PROPSPAN_TESTS_COMMON_TEST_SUPPORT_H_
