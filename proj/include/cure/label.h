#ifndef CURE_LABEL_H_
#define CURE_LABEL_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cure/ssp.h"
#include "cure/vocab.h"

namespace cure {

// Candidate relation words with their counts. std::map keeps iteration
// lexicographic, which the tie rules below rely on.
using WordCounts = std::map<std::string, int>;

struct LabelCandidates {
  std::vector<std::pair<std::string, double>> ranked;  // best first

  const std::string &chosen() const { return ranked.front().first; }
};

using Stopwords = std::set<std::string>;

// One word per line; blank lines and '#' comments are skipped.
Stopwords LoadStopwords(const std::filesystem::path &path);
// The list shipped in data/stopwords.txt.
Stopwords DefaultStopwords();

// Non-stopword path words of a cluster's members, counted with multiplicity.
// The first and last word of each path (the entity endpoints) are skipped.
// Throws ValidationError("empty candidate set") when nothing survives.
WordCounts CandidateSet(const std::vector<SspTriple> &member_paths,
                        const Stopwords &stopwords);

// Word-vector-similarity labeling. Each distinct word r_i with a vector gets
// raw_i = Count(r_i) * sum_{j != i} (1 - cos(r_i, r_j)); the raws are min-max
// normalized (a single word, or all raws equal, gives weight 1), v is the
// weighted sum of word vectors, and words are ranked by cos(word, v), ties
// lexicographic. Words without a vector are skipped.
LabelCandidates WvsLabel(const WordCounts &candidates,
                         const PretrainedVectors &vectors);

// Common-words baseline: rank by count, ties lexicographic. Scores are counts.
LabelCandidates CwLabel(const WordCounts &candidates);

// The gold relation whose name vector is closest (cosine) to the first
// ranked label word that has a vector. Ties go to the lexicographically
// smaller relation.
std::string MatchToGold(const LabelCandidates &label,
                        const std::vector<std::string> &gold_relations,
                        const PretrainedVectors &vectors);

}  // namespace cure

#endif  // CURE_LABEL_H_
