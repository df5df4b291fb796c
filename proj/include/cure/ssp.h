#ifndef CURE_SSP_H_
#define CURE_SSP_H_

#include <string>
#include <vector>

namespace cure {

struct ParsedSentence;
struct EntitySpan;

// Reserved symbols shared by the word, dependency and POS alphabets.
inline constexpr const char *kPadSymbol = "<pad>";
inline constexpr const char *kUnkSymbol = "<unk>";

// Parallel word / dependency-tag / POS sequences along a shortest path,
// ordered from the subject's representative token to the object's.
struct SspTriple {
  std::vector<std::string> words;
  std::vector<std::string> deps;
  std::vector<std::string> poss;

  int size() const { return static_cast<int>(words.size()); }
  bool operator==(const SspTriple &) const = default;
  auto operator<=>(const SspTriple &) const = default;
};

// A path brought to a fixed length. true_length counts the real elements.
struct PaddedPath {
  SspTriple path;
  int true_length = 0;
};

// Picks the token that stands for a multi-token entity: first a subject tag,
// then an object tag, then a modifier tag, scanning the span left to right
// within each class. Without any of those, the span token whose head lies
// outside the span (the last such one) is used.
int RepresentativeToken(const ParsedSentence &sentence, const EntitySpan &span);

// The tree path between the two representative tokens, subject first.
// Throws ValidationError("degenerate path") when both representatives
// coincide.
SspTriple ShortestPath(const ParsedSentence &sentence);

// Pads with kPadSymbol at the end, or truncates to the first n_l - 1 elements
// plus the last one so that both endpoints survive.
PaddedPath PadOrTruncate(const SspTriple &path, int n_l);

// Checks the three sequences have equal nonzero length.
void ValidateTriple(const SspTriple &path);

}  // namespace cure

#endif  // CURE_SSP_H_
