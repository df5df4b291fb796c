#ifndef CURE_CORPUS_H_
#define CURE_CORPUS_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cure/ssp.h"

namespace cure {

struct Token {
  std::string text;
  std::string pos;
  std::string dep;
  int head = -1;  // index of the head token, -1 for the root

  bool operator==(const Token &) const = default;
};

// Half-open token range [start, end) naming one entity mention.
struct EntitySpan {
  int start = 0;
  int end = 0;
  std::string canonical;

  bool operator==(const EntitySpan &) const = default;
};

struct ParsedSentence {
  std::string id;
  std::vector<Token> tokens;
  EntitySpan subject;
  EntitySpan object;

  bool operator==(const ParsedSentence &) const = default;
};

// Ordered (subject, object) key. (A, B) and (B, A) are different pairs.
using PairKey = std::pair<std::string, std::string>;

// One shortest path together with the entity pair it was extracted for.
struct PathRecord {
  PairKey pair;
  SspTriple path;
};

// All paths observed for one entity pair.
struct PairGroup {
  PairKey pair;
  std::vector<SspTriple> paths;
};

// Collapses runs of whitespace to one space and trims the ends. Case is kept.
std::string CanonicalizeEntity(std::string_view text);

// Checks the tree and span invariants. Throws ValidationError.
void ValidateSentence(const ParsedSentence &sentence);

// Parses one JSON Lines record and validates it.
ParsedSentence ParseRecord(std::string_view line);

// Serializes a sentence to one JSON line (no trailing newline).
std::string FormatRecord(const ParsedSentence &sentence);

// Reads a corpus file. Blank lines are skipped. Errors carry the 1-based line
// number.
std::vector<ParsedSentence> ParseCorpus(const std::filesystem::path &path);

// Groups paths by ordered pair, keeps groups with at least min_paths paths,
// and returns them sorted by key. Paths inside a group are sorted too, so the
// result does not depend on input order.
std::vector<PairGroup> GroupPairs(const std::vector<PathRecord> &records,
                                  int min_paths = 2);

// Runs ShortestPath over every sentence, in order.
std::vector<PathRecord> ExtractPaths(const std::vector<ParsedSentence> &sentences);

// Path file: one JSON line per instance,
// {"pair": [s, o], "words": [...], "deps": [...], "poss": [...]}.
std::string FormatPathRecord(const PathRecord &record);
PathRecord ParsePathRecord(std::string_view line);
void WritePathFile(const std::filesystem::path &path,
                   const std::vector<PathRecord> &records);
std::vector<PathRecord> ReadPathFile(const std::filesystem::path &path);

// "subject\tobject", the flat key used for evaluation maps.
std::string JoinPairKey(const PairKey &pair);

}  // namespace cure

#endif  // CURE_CORPUS_H_
