#include "cure/ssp.h"

#include <algorithm>
#include <array>
#include <string_view>

#include "cure/corpus.h"
#include "cure/error.h"

namespace cure {

namespace {

constexpr std::array<std::string_view, 3> kSubjectTags = {"nsubj", "nsubjpass",
                                                          "csubj"};
constexpr std::array<std::string_view, 4> kObjectTags = {"dobj", "pobj", "iobj",
                                                         "obj"};
constexpr std::array<std::string_view, 4> kModifierTags = {"amod", "nmod",
                                                           "appos", "poss"};

template <size_t N>
bool Contains(const std::array<std::string_view, N> &tags,
              std::string_view tag) {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

// Token indices from `from` up to the root, inclusive.
std::vector<int> PathToRoot(const ParsedSentence &s, int from) {
  std::vector<int> chain;
  for (int cur = from; cur != -1; cur = s.tokens[cur].head) {
    chain.push_back(cur);
  }
  return chain;
}

}  // namespace

int RepresentativeToken(const ParsedSentence &s, const EntitySpan &span) {
  for (int i = span.start; i < span.end; ++i) {
    if (Contains(kSubjectTags, s.tokens[i].dep)) return i;
  }
  for (int i = span.start; i < span.end; ++i) {
    if (Contains(kObjectTags, s.tokens[i].dep)) return i;
  }
  for (int i = span.start; i < span.end; ++i) {
    if (Contains(kModifierTags, s.tokens[i].dep)) return i;
  }
  int chosen = span.end - 1;
  for (int i = span.start; i < span.end; ++i) {
    const int head = s.tokens[i].head;
    if (head < span.start || head >= span.end) chosen = i;
  }
  return chosen;
}

SspTriple ShortestPath(const ParsedSentence &s) {
  const int from = RepresentativeToken(s, s.subject);
  const int to = RepresentativeToken(s, s.object);
  if (from == to) throw ValidationError("degenerate path");

  // Climb both chains to the root and splice them at the lowest common
  // ancestor.
  std::vector<int> up = PathToRoot(s, from);
  std::vector<int> down = PathToRoot(s, to);
  while (up.size() >= 2 && down.size() >= 2 &&
         up[up.size() - 2] == down[down.size() - 2]) {
    up.pop_back();
    down.pop_back();
  }
  // up.back() == down.back() is the common ancestor.
  down.pop_back();
  std::vector<int> order = std::move(up);
  order.insert(order.end(), down.rbegin(), down.rend());

  SspTriple out;
  for (int idx : order) {
    const Token &t = s.tokens[idx];
    out.words.push_back(t.text);
    out.deps.push_back(t.dep);
    out.poss.push_back(t.pos);
  }
  return out;
}

PaddedPath PadOrTruncate(const SspTriple &path, int n_l) {
  if (n_l < 2) throw ValidationError("n_l must be >= 2");
  SspTriple trimmed = path;
  while (!trimmed.words.empty() && trimmed.words.back() == kPadSymbol) {
    trimmed.words.pop_back();
    trimmed.deps.pop_back();
    trimmed.poss.pop_back();
  }
  const int len = trimmed.size();
  PaddedPath out;
  if (len > n_l) {
    auto keep = [&](std::vector<std::string> &seq) {
      std::string last = seq.back();
      seq.resize(n_l - 1);
      seq.push_back(std::move(last));
    };
    keep(trimmed.words);
    keep(trimmed.deps);
    keep(trimmed.poss);
    out.true_length = n_l;
  } else {
    out.true_length = len;
    trimmed.words.resize(n_l, kPadSymbol);
    trimmed.deps.resize(n_l, kPadSymbol);
    trimmed.poss.resize(n_l, kPadSymbol);
  }
  out.path = std::move(trimmed);
  return out;
}

void ValidateTriple(const SspTriple &path) {
  if (path.words.empty() || path.words.size() != path.deps.size() ||
      path.words.size() != path.poss.size()) {
    throw ValidationError("path sequences must be nonempty and equally long");
  }
}

}  // namespace cure
