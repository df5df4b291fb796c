#include "cure/label.h"

#include <algorithm>
#include <fstream>

#include "cure/error.h"

#ifndef CURE_DEFAULT_STOPWORDS
#define CURE_DEFAULT_STOPWORDS "data/stopwords.txt"
#endif

namespace cure {

Stopwords LoadStopwords(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stopwords " + path.string());
  Stopwords words;
  std::string line;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    const auto end = line.find_last_not_of(" \t\r");
    words.insert(line.substr(begin, end - begin + 1));
  }
  return words;
}

Stopwords DefaultStopwords() { return LoadStopwords(CURE_DEFAULT_STOPWORDS); }

WordCounts CandidateSet(const std::vector<SspTriple> &member_paths,
                        const Stopwords &stopwords) {
  WordCounts counts;
  for (const SspTriple &p : member_paths) {
    // A padded path ends at its last real element, not at the padding.
    int last = p.size() - 1;
    while (last > 0 && p.words[last] == kPadSymbol) --last;
    for (int i = 1; i < last; ++i) {
      const std::string &w = p.words[i];
      if (w == kPadSymbol || stopwords.count(w)) continue;
      ++counts[w];
    }
  }
  if (counts.empty()) throw ValidationError("empty candidate set");
  return counts;
}

namespace {

void RankDescending(std::vector<std::pair<std::string, double>> &ranked) {
  // Input is already lexicographic, so a stable sort keeps that for ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
}

}  // namespace

LabelCandidates WvsLabel(const WordCounts &candidates,
                         const PretrainedVectors &vectors) {
  std::vector<std::string> words;
  std::vector<const std::vector<double> *> vecs;
  std::vector<double> counts;
  for (const auto &[word, count] : candidates) {
    if (const auto *v = vectors.Find(word)) {
      words.push_back(word);
      vecs.push_back(v);
      counts.push_back(count);
    }
  }
  if (words.empty()) {
    throw ValidationError("no candidate word has a pretrained vector");
  }
  const size_t n = words.size();
  LabelCandidates out;
  if (n == 1) {
    out.ranked.emplace_back(words[0], 1.0);
    return out;
  }

  std::vector<double> raw(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double dissimilarity = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (j != i) dissimilarity += 1.0 - Cosine(*vecs[i], *vecs[j]);
    }
    raw[i] = counts[i] * dissimilarity;
  }
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min = *lo, range = *hi - *lo;

  std::vector<double> v(vectors.dim(), 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double weight = range > 0.0 ? (raw[i] - min) / range : 1.0;
    for (size_t d = 0; d < v.size(); ++d) v[d] += weight * (*vecs[i])[d];
  }
  for (size_t i = 0; i < n; ++i) {
    out.ranked.emplace_back(words[i], Cosine(*vecs[i], v));
  }
  RankDescending(out.ranked);
  return out;
}

LabelCandidates CwLabel(const WordCounts &candidates) {
  if (candidates.empty()) throw ValidationError("empty candidate set");
  LabelCandidates out;
  for (const auto &[word, count] : candidates) out.ranked.emplace_back(word, count);
  RankDescending(out.ranked);
  return out;
}

std::string MatchToGold(const LabelCandidates &label,
                        const std::vector<std::string> &gold_relations,
                        const PretrainedVectors &vectors) {
  if (gold_relations.empty()) throw ValidationError("no gold relations");
  std::vector<std::string> relations = gold_relations;
  std::sort(relations.begin(), relations.end());
  for (const std::string &r : relations) {
    if (!vectors.Contains(r)) {
      throw ValidationError("gold relation '" + r + "' has no vector");
    }
  }
  for (const auto &[word, score] : label.ranked) {
    const auto *wv = vectors.Find(word);
    if (wv == nullptr) continue;
    const std::string *best = nullptr;
    double best_sim = 0.0;
    for (const std::string &r : relations) {
      const double sim = Cosine(*wv, *vectors.Find(r));
      if (best == nullptr || sim > best_sim) {
        best = &r;
        best_sim = sim;
      }
    }
    return *best;
  }
  throw ValidationError("no label candidate has a pretrained vector");
}

}  // namespace cure
