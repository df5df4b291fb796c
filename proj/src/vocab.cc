#include "cure/vocab.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "cure/error.h"

namespace cure {

Vocab::Vocab() {
  Add(kPadSymbol);
  Add(kUnkSymbol);
}

Vocab::Vocab(const std::vector<std::string> &symbols) : Vocab() {
  for (const std::string &s : symbols) {
    if (s == kPadSymbol || s == kUnkSymbol) continue;
    if (index_.count(s)) throw ValidationError("duplicate symbol '" + s + "'");
    Add(s);
  }
}

void Vocab::Add(const std::string &symbol) {
  index_.emplace(symbol, static_cast<int>(symbols_.size()));
  symbols_.push_back(symbol);
}

int Vocab::Lookup(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? kUnk : it->second;
}

namespace {

std::vector<std::string> RankByFrequency(
    const std::map<std::string, int> &counts, int min_freq) {
  std::vector<std::pair<std::string, int>> kept;
  for (const auto &[symbol, count] : counts) {
    if (count >= min_freq && symbol != kPadSymbol && symbol != kUnkSymbol) {
      kept.emplace_back(symbol, count);
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
    return a.second > b.second;
  });
  std::vector<std::string> out;
  out.reserve(kept.size());
  for (auto &entry : kept) out.push_back(std::move(entry.first));
  return out;
}

}  // namespace

Vocabularies BuildVocab(std::span<const SspTriple> paths, int min_freq) {
  if (min_freq < 1) throw ValidationError("min_freq must be >= 1");
  std::map<std::string, int> words, deps, poss;
  for (const SspTriple &p : paths) {
    for (const auto &w : p.words) ++words[w];
    for (const auto &d : p.deps) ++deps[d];
    for (const auto &t : p.poss) ++poss[t];
  }
  // std::map iterates lexicographically, and the stable sort keeps that order
  // among equal counts.
  return Vocabularies{Vocab(RankByFrequency(words, min_freq)),
                      Vocab(RankByFrequency(deps, 1)),
                      Vocab(RankByFrequency(poss, 1))};
}

void PretrainedVectors::Add(const std::string &token, std::vector<double> vec) {
  if (vec.empty()) throw ValidationError("empty vector for '" + token + "'");
  if (dim_ == 0) dim_ = static_cast<int>(vec.size());
  if (static_cast<int>(vec.size()) != dim_) {
    throw ValidationError("vector for '" + token + "' has dimension " +
                          std::to_string(vec.size()) + ", expected " +
                          std::to_string(dim_));
  }
  for (double v : vec) {
    if (!std::isfinite(v)) {
      throw ValidationError("non-finite value in vector for '" + token + "'");
    }
  }
  if (!vectors_.emplace(token, std::move(vec)).second) {
    throw ValidationError("duplicate token '" + token + "'");
  }
}

const std::vector<double> *PretrainedVectors::Find(
    std::string_view token) const {
  auto it = vectors_.find(std::string(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

namespace {

bool ParseDouble(const std::string &field, double *out) {
  const char *end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, *out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

PretrainedVectors LoadPretrained(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open vectors " + path.string());
  PretrainedVectors vectors;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::vector<std::string> parts;
    for (std::string f; fields >> f;) parts.push_back(std::move(f));
    if (parts.empty()) continue;

    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (lineno == 1 && parts.size() == 2) {
      double a, b;
      if (ParseDouble(parts[0], &a) && ParseDouble(parts[1], &b)) continue;
    }
    if (parts.size() < 2) throw ValidationError(where + ": missing values");
    std::vector<double> vec(parts.size() - 1);
    for (size_t i = 1; i < parts.size(); ++i) {
      if (!ParseDouble(parts[i], &vec[i - 1])) {
        throw ValidationError(where + ": bad number '" + parts[i] + "'");
      }
    }
    try {
      vectors.Add(parts[0], std::move(vec));
    } catch (const ValidationError &e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return vectors;
}

void SavePretrained(const std::filesystem::path &path,
                    const std::vector<std::string> &tokens,
                    const PretrainedVectors &vectors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << tokens.size() << ' ' << vectors.dim() << '\n';
  char buf[64];
  for (const std::string &t : tokens) {
    const std::vector<double> *vec = vectors.Find(t);
    if (vec == nullptr) throw ValidationError("no vector for '" + t + "'");
    out << t;
    for (double v : *vec) {
      auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

double Cosine(std::span<const double> a, std::span<const double> b) {
  const double na = Norm(a), nb = Norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return Dot(a, b) / (na * nb);
}

}  // namespace cure
