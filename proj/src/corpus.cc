#include "cure/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "cure/error.h"
#include "json.hpp"

namespace cure {

using nlohmann::json;

namespace {

std::string Describe(const ParsedSentence &s) {
  return s.id.empty() ? std::string("sentence") : "sentence '" + s.id + "'";
}

void ValidateSpan(const ParsedSentence &s, const EntitySpan &span,
                  const char *role) {
  const int n = static_cast<int>(s.tokens.size());
  if (span.start == span.end) {
    throw ValidationError(Describe(s) + ": " + role + ": empty span");
  }
  if (span.start < 0 || span.start > span.end || span.end > n) {
    throw ValidationError(Describe(s) + ": " + role + " span [" +
                          std::to_string(span.start) + "," +
                          std::to_string(span.end) + ") out of range");
  }
  if (span.canonical.empty()) {
    throw ValidationError(Describe(s) + ": " + role + ": empty canonical name");
  }
}

EntitySpan SpanFromJson(const json &j) {
  EntitySpan span;
  span.start = j.at("start").get<int>();
  span.end = j.at("end").get<int>();
  span.canonical = CanonicalizeEntity(j.at("canonical").get<std::string>());
  return span;
}

json SpanToJson(const EntitySpan &span) {
  return json{{"start", span.start},
              {"end", span.end},
              {"canonical", span.canonical}};
}

}  // namespace

std::string CanonicalizeEntity(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

void ValidateSentence(const ParsedSentence &s) {
  const int n = static_cast<int>(s.tokens.size());
  if (n == 0) throw ValidationError(Describe(s) + ": no tokens");

  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token &t = s.tokens[i];
    if (t.head == -1) {
      if (t.dep != "ROOT") {
        throw ValidationError(Describe(s) + ": token " + std::to_string(i) +
                              " has no head but dep '" + t.dep + "'");
      }
      ++roots;
    } else if (t.head < 0 || t.head >= n) {
      throw ValidationError(Describe(s) + ": token " + std::to_string(i) +
                            " head " + std::to_string(t.head) +
                            " out of range");
    } else if (t.head == i) {
      throw ValidationError(Describe(s) + ": token " + std::to_string(i) +
                            " is its own head");
    } else if (t.dep == "ROOT") {
      throw ValidationError(Describe(s) + ": token " + std::to_string(i) +
                            " tagged ROOT but has a head");
    }
  }
  if (roots != 1) {
    throw ValidationError(Describe(s) + ": expected exactly one root, found " +
                          std::to_string(roots));
  }

  // 0 = unvisited, 1 = on current walk, 2 = known to reach the root.
  std::vector<char> state(n, 0);
  for (int i = 0; i < n; ++i) {
    std::vector<int> walk;
    int cur = i;
    while (cur != -1 && state[cur] == 0) {
      state[cur] = 1;
      walk.push_back(cur);
      cur = s.tokens[cur].head;
    }
    if (cur != -1 && state[cur] == 1) {
      throw ValidationError(Describe(s) + ": cyclic head links through token " +
                            std::to_string(cur));
    }
    for (int w : walk) state[w] = 2;
  }

  ValidateSpan(s, s.subject, "subject");
  ValidateSpan(s, s.object, "object");
  if (s.subject.start < s.object.end && s.object.start < s.subject.end) {
    throw ValidationError(Describe(s) + ": subject and object spans overlap");
  }
}

ParsedSentence ParseRecord(std::string_view line) {
  ParsedSentence s;
  try {
    const json j = json::parse(line);
    s.id = j.at("id").get<std::string>();
    for (const json &t : j.at("tokens")) {
      s.tokens.push_back(Token{t.at("text").get<std::string>(),
                               t.at("pos").get<std::string>(),
                               t.at("dep").get<std::string>(),
                               t.at("head").get<int>()});
    }
    s.subject = SpanFromJson(j.at("subject"));
    s.object = SpanFromJson(j.at("object"));
  } catch (const json::exception &e) {
    throw ValidationError(std::string("malformed record: ") + e.what());
  }
  ValidateSentence(s);
  return s;
}

std::string FormatRecord(const ParsedSentence &s) {
  json tokens = json::array();
  for (const Token &t : s.tokens) {
    tokens.push_back(
        json{{"text", t.text}, {"pos", t.pos}, {"dep", t.dep}, {"head", t.head}});
  }
  json j{{"id", s.id},
         {"tokens", std::move(tokens)},
         {"subject", SpanToJson(s.subject)},
         {"object", SpanToJson(s.object)}};
  return j.dump();
}

std::vector<ParsedSentence> ParseCorpus(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus " + path.string());
  std::vector<ParsedSentence> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ParseRecord(line));
    } catch (const ValidationError &e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": " + e.what());
    }
  }
  return out;
}

std::vector<PairGroup> GroupPairs(const std::vector<PathRecord> &records,
                                  int min_paths) {
  if (min_paths < 1) throw ValidationError("min_paths must be >= 1");
  std::map<PairKey, std::vector<SspTriple>> by_pair;
  for (const PathRecord &r : records) by_pair[r.pair].push_back(r.path);

  std::vector<PairGroup> groups;
  for (auto &[key, paths] : by_pair) {
    if (static_cast<int>(paths.size()) < min_paths) continue;
    std::sort(paths.begin(), paths.end());
    groups.push_back(PairGroup{key, std::move(paths)});
  }
  return groups;
}

std::vector<PathRecord> ExtractPaths(
    const std::vector<ParsedSentence> &sentences) {
  std::vector<PathRecord> out;
  out.reserve(sentences.size());
  for (const ParsedSentence &s : sentences) {
    try {
      out.push_back(PathRecord{{s.subject.canonical, s.object.canonical},
                               ShortestPath(s)});
    } catch (const ValidationError &e) {
      throw ValidationError(Describe(s) + ": " + e.what());
    }
  }
  return out;
}

std::string FormatPathRecord(const PathRecord &r) {
  json j{{"pair", {r.pair.first, r.pair.second}},
         {"words", r.path.words},
         {"deps", r.path.deps},
         {"poss", r.path.poss}};
  return j.dump();
}

PathRecord ParsePathRecord(std::string_view line) {
  PathRecord r;
  try {
    const json j = json::parse(line);
    const json &pair = j.at("pair");
    if (!pair.is_array() || pair.size() != 2) {
      throw ValidationError("pair must be a two-element array");
    }
    r.pair = {pair[0].get<std::string>(), pair[1].get<std::string>()};
    r.path.words = j.at("words").get<std::vector<std::string>>();
    r.path.deps = j.at("deps").get<std::vector<std::string>>();
    r.path.poss = j.at("poss").get<std::vector<std::string>>();
  } catch (const json::exception &e) {
    throw ValidationError(std::string("malformed path record: ") + e.what());
  }
  ValidateTriple(r.path);
  return r;
}

void WritePathFile(const std::filesystem::path &path,
                   const std::vector<PathRecord> &records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (const PathRecord &r : records) out << FormatPathRecord(r) << '\n';
}

std::vector<PathRecord> ReadPathFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open path file " + path.string());
  std::vector<PathRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ParsePathRecord(line));
    } catch (const ValidationError &e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": " + e.what());
    }
  }
  return out;
}

std::string JoinPairKey(const PairKey &pair) {
  return pair.first + "\t" + pair.second;
}

}  // namespace cure
