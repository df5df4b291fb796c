#include <algorithm>
#include <random>
#include <set>

#include "cure/corpus.h"
#include "cure/error.h"
#include "cure/label.h"
#include "cure/ssp.h"
#include "cure/synth.h"
#include "doctest.h"
#include "support.h"

using namespace cure;

TEST_CASE("smallest corpus") {
  SynthOptions o;
  o.relations = 1;
  o.pairs = 1;
  o.sentences = 2;
  const SynthCorpus c = Generate(o);
  CHECK(c.sentences.size() == 2);
  REQUIRE(c.gold.size() == 1);
  CHECK(c.gold[0].second == BuiltinRelations()[0].name);
  for (const ParsedSentence &s : c.sentences) {
    CHECK(s.subject.canonical == c.gold[0].first.first);
    CHECK(s.object.canonical == c.gold[0].first.second);
  }
}

TEST_CASE("default corpus shape") {
  const SynthCorpus c = Generate(SynthOptions{});
  CHECK(c.sentences.size() == 4 * 25 * 3);
  CHECK(c.gold.size() == 100);
  std::set<PairKey> pairs;
  for (const auto &[pair, relation] : c.gold) pairs.insert(pair);
  CHECK(pairs.size() == 100);
  for (const ParsedSentence &s : c.sentences) CHECK_NOTHROW(ValidateSentence(s));
  REQUIRE(c.vectors.size() == c.vector_tokens.size());
  for (const auto &v : c.vectors) CHECK(v.size() == kToyVectorDim);
  // Relation names must be in the vector file for gold matching.
  for (const RelationTemplate &r : BuiltinRelations()) {
    CHECK(std::count(c.vector_tokens.begin(), c.vector_tokens.end(), r.name) == 1);
  }
}

TEST_CASE("large pair counts still give distinct pairs") {
  SynthOptions o;
  o.relations = 2;
  o.pairs = 120;
  o.sentences = 2;
  const SynthCorpus c = Generate(o);
  std::set<PairKey> pairs;
  for (const auto &[pair, relation] : c.gold) pairs.insert(pair);
  CHECK(pairs.size() == 240);
}

TEST_CASE("same seed gives identical files") {
  testing::ScratchDir a("synth-a"), b("synth-b"), c("synth-c");
  SynthOptions o;
  WriteSynthCorpus(Generate(o), a.path());
  WriteSynthCorpus(Generate(o), b.path());
  o.seed = 8;
  WriteSynthCorpus(Generate(o), c.path());
  for (const char *name : {"corpus.jsonl", "gold.jsonl", "embeddings.txt"}) {
    CHECK(testing::ReadFile(a / name) == testing::ReadFile(b / name));
  }
  CHECK(testing::ReadFile(a / "corpus.jsonl") != testing::ReadFile(c / "corpus.jsonl"));
  // The written corpus parses back to the generated sentences.
  const auto parsed = ParseCorpus(a / "corpus.jsonl");
  CHECK(parsed.size() == 300);
}

TEST_CASE("every template puts its trigger on the path") {
  const Stopwords stop = DefaultStopwords();
  std::mt19937_64 rng(4);
  const std::vector<std::vector<std::string>> names = {
      {"Ada"}, {"Bo", "Lind"}, {"Cy", "de", "Vora"}};
  for (const RelationTemplate &rel : BuiltinRelations()) {
    CHECK(rel.templates.size() == 3);
    for (const SentenceTemplate &t : rel.templates) {
      CAPTURE(rel.name);
      CAPTURE(t.trigger);
      CHECK(stop.count(t.trigger) == 0);
      for (int trial = 0; trial < 5; ++trial) {
        const auto &subj = names[rng() % names.size()];
        auto obj = names[rng() % names.size()];
        obj.back() += "x";
        const ParsedSentence s = Realize(t, "t", subj, obj);
        const SspTriple path = ShortestPath(s);
        CHECK(std::find(path.words.begin(), path.words.end(), t.trigger) !=
              path.words.end());
      }
    }
  }
}

TEST_CASE("synth option checks") {
  SynthOptions o;
  o.relations = 0;
  CHECK_THROWS_AS(Generate(o), ValidationError);
  o.relations = 5;
  CHECK_THROWS_AS(Generate(o), ValidationError);
  o = SynthOptions{};
  o.pairs = 0;
  CHECK_THROWS_AS(Generate(o), ValidationError);
  o = SynthOptions{};
  o.sentences = 1;
  CHECK_THROWS_AS(Generate(o), ValidationError);
}
