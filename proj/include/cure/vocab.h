#ifndef CURE_VOCAB_H_
#define CURE_VOCAB_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cure/ssp.h"

namespace cure {

// Dense symbol table with kPadSymbol at 0 and kUnkSymbol at 1. Lookup is
// total: anything unseen maps to the UNK id.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocab();
  // Builds from an explicit symbol list; the two reserved symbols are
  // prepended (and dropped from `symbols` if present).
  explicit Vocab(const std::vector<std::string> &symbols);

  int Lookup(std::string_view symbol) const;
  const std::string &Symbol(int id) const { return symbols_.at(id); }
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string> &symbols() const { return symbols_; }

  bool operator==(const Vocab &other) const {
    return symbols_ == other.symbols_;
  }

 private:
  void Add(const std::string &symbol);

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

struct Vocabularies {
  Vocab words;
  Vocab deps;
  Vocab poss;
};

// Frequency-descending, then lexicographic. Words below min_freq are left
// out (they read back as UNK); dependency and POS tags are all kept.
Vocabularies BuildVocab(std::span<const SspTriple> paths, int min_freq = 2);

// Word vectors read from a plain text file: optional "count dim" header,
// then "token v1 ... vd" per line.
class PretrainedVectors {
 public:
  PretrainedVectors() = default;

  // Throws ValidationError on dimension mismatch or duplicates.
  void Add(const std::string &token, std::vector<double> vec);

  const std::vector<double> *Find(std::string_view token) const;
  bool Contains(std::string_view token) const { return Find(token) != nullptr; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(vectors_.size()); }

 private:
  int dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

PretrainedVectors LoadPretrained(const std::filesystem::path &path);

// Writes in the same text format LoadPretrained reads, with a header line.
void SavePretrained(const std::filesystem::path &path,
                    const std::vector<std::string> &tokens,
                    const PretrainedVectors &vectors);

double Dot(std::span<const double> a, std::span<const double> b);
double Norm(std::span<const double> a);
// 0 when either vector is zero.
double Cosine(std::span<const double> a, std::span<const double> b);

}  // namespace cure

#endif  // CURE_VOCAB_H_
