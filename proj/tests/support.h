// Helpers shared by the unit tests and the acceptance runner: fixture paths,
// scratch directories, random dependency trees and the independent oracles
// that several suites compare against.

#ifndef CURE_TESTS_SUPPORT_H_
#define CURE_TESTS_SUPPORT_H_

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cure/cluster.h"
#include "cure/corpus.h"
#include "cure/encdec.h"
#include "cure/evaluation.h"
#include "cure/label.h"

namespace testing {

namespace fs = std::filesystem;

fs::path DataPath(const std::string &name);

// Fresh empty directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string &tag);
  ~ScratchDir();
  ScratchDir(const ScratchDir &) = delete;
  ScratchDir &operator=(const ScratchDir &) = delete;
  const fs::path &path() const { return path_; }
  fs::path operator/(const std::string &name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string ReadFile(const fs::path &path);
void WriteFile(const fs::path &path, const std::string &text);

cure::ParsedSentence ReaganSentence();

// Random valid sentence of 2..max_tokens tokens with two disjoint spans.
cure::ParsedSentence RandomSentence(std::mt19937_64 &rng, int max_tokens);

// Representative-token rule written out directly from the tag classes.
int OracleRepresentative(const cure::ParsedSentence &s,
                         const cure::EntitySpan &span);

// Token indices on the shortest undirected path between two tokens, found
// by breadth-first search.
std::vector<int> BfsPath(const cure::ParsedSentence &s, int from, int to);

// Merge sequence from recomputing every average linkage from scratch at each
// step. Returns (first, second, size) triples plus distances.
cure::Dendrogram BruteForceHac(const std::vector<std::vector<double>> &points);

// Counts agreeing item pairs with a double loop.
double BruteForceRandIndex(const cure::Partition &a, const cure::Partition &b);

// The WVS scoring rule evaluated directly in long double. Returns words best
// first.
std::vector<std::string> LongDoubleWvsRanking(
    const cure::WordCounts &counts,
    const std::vector<std::pair<std::string, std::vector<double>>> &vectors);

// Finite-difference relative error with a small absolute floor so that
// gradients that are both ~0 do not blow up the ratio.
double RelativeError(double analytic, double numeric);

// Model over words w0..w{n_w-3}, deps d0..d3 and tags p0..p2, initialized
// uniformly from `seed` (all zero when init_range is 0).
cure::Model ToyModel(const cure::ModelConfig &config, int n_w,
                     std::uint64_t seed);

// Random path over the toy alphabets with 1..max_len elements.
cure::SspTriple ToyPath(std::mt19937_64 &rng, int n_w, int max_len);

// Largest finite-difference relative error per parameter tensor for the
// leave-one-out loss with n_h = n_h2 = 4, n_g = 8, n_l = 5, n_w = 20 and two
// input paths.
std::map<std::string, double> EncoderDecoderGradientErrors(std::uint64_t seed);

}  // namespace testing

#endif  // CURE_TESTS_SUPPORT_H_
