#include "cure/synth.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "cure/autodiff.h"
#include "cure/encdec.h"
#include "cure/error.h"
#include "json.hpp"

namespace cure {

namespace {

TemplateToken W(const char *text, const char *pos, const char *dep, int head) {
  return TemplateToken{text, pos, dep, head, false, false};
}
TemplateToken Subj(const char *dep, int head) {
  return TemplateToken{"", "PROPN", dep, head, true, false};
}
TemplateToken Obj(const char *dep, int head) {
  return TemplateToken{"", "PROPN", dep, head, false, true};
}

std::vector<RelationTemplate> MakeBuiltins() {
  std::vector<RelationTemplate> r;

  r.push_back({"capital", EntityType::kCity, EntityType::kCountry,
               {
                   // S is the capital of O .
                   {{Subj("nsubj", 1), W("is", "AUX", "ROOT", -1),
                     W("the", "DET", "det", 3), W("capital", "NOUN", "attr", 1),
                     W("of", "ADP", "prep", 3), Obj("pobj", 4),
                     W(".", "PUNCT", "punct", 1)},
                    "capital"},
                   // S remains the capital of O .
                   {{Subj("nsubj", 1), W("remains", "VERB", "ROOT", -1),
                     W("the", "DET", "det", 3), W("capital", "NOUN", "attr", 1),
                     W("of", "ADP", "prep", 3), Obj("pobj", 4),
                     W(".", "PUNCT", "punct", 1)},
                    "capital"},
                   // S became the capital of O in 1990 .
                   {{Subj("nsubj", 1), W("became", "VERB", "ROOT", -1),
                     W("the", "DET", "det", 3), W("capital", "NOUN", "attr", 1),
                     W("of", "ADP", "prep", 3), Obj("pobj", 4),
                     W("in", "ADP", "prep", 1), W("1990", "NUM", "pobj", 6),
                     W(".", "PUNCT", "punct", 1)},
                    "capital"},
               },
               {"capital", "remains", "became"}});

  r.push_back({"placeBirth", EntityType::kPerson, EntityType::kCity,
               {
                   // S was born in O .
                   {{Subj("nsubjpass", 2), W("was", "AUX", "auxpass", 2),
                     W("born", "VERB", "ROOT", -1), W("in", "ADP", "prep", 2),
                     Obj("pobj", 3), W(".", "PUNCT", "punct", 2)},
                    "born"},
                   // S was born in O in 1950 .
                   {{Subj("nsubjpass", 2), W("was", "AUX", "auxpass", 2),
                     W("born", "VERB", "ROOT", -1), W("in", "ADP", "prep", 2),
                     Obj("pobj", 3), W("in", "ADP", "prep", 2),
                     W("1950", "NUM", "pobj", 5), W(".", "PUNCT", "punct", 2)},
                    "born"},
                   // In 1950 , S was born in O .
                   {{W("In", "ADP", "prep", 5), W("1950", "NUM", "pobj", 0),
                     W(",", "PUNCT", "punct", 5), Subj("nsubjpass", 5),
                     W("was", "AUX", "auxpass", 5), W("born", "VERB", "ROOT", -1),
                     W("in", "ADP", "prep", 5), Obj("pobj", 6),
                     W(".", "PUNCT", "punct", 5)},
                    "born"},
               },
               {"born"}});

  r.push_back({"founders", EntityType::kPerson, EntityType::kOrganization,
               {
                   // S founded O .
                   {{Subj("nsubj", 1), W("founded", "VERB", "ROOT", -1),
                     Obj("dobj", 1), W(".", "PUNCT", "punct", 1)},
                    "founded"},
                   // S established O in 1998 .
                   {{Subj("nsubj", 1), W("established", "VERB", "ROOT", -1),
                     Obj("dobj", 1), W("in", "ADP", "prep", 1),
                     W("1998", "NUM", "pobj", 3), W(".", "PUNCT", "punct", 1)},
                    "established"},
                   // S quietly launched O .
                   {{Subj("nsubj", 2), W("quietly", "ADV", "advmod", 2),
                     W("launched", "VERB", "ROOT", -1), Obj("dobj", 2),
                     W(".", "PUNCT", "punct", 2)},
                    "launched"},
               },
               {"founded", "established", "launched"}});

  r.push_back({"neighborOf", EntityType::kCountry, EntityType::kCountry,
               {
                   // S borders O .
                   {{Subj("nsubj", 1), W("borders", "VERB", "ROOT", -1),
                     Obj("dobj", 1), W(".", "PUNCT", "punct", 1)},
                    "borders"},
                   // S adjoins O to the north .
                   {{Subj("nsubj", 1), W("adjoins", "VERB", "ROOT", -1),
                     Obj("dobj", 1), W("to", "ADP", "prep", 1),
                     W("the", "DET", "det", 5), W("north", "NOUN", "pobj", 3),
                     W(".", "PUNCT", "punct", 1)},
                    "adjoins"},
                   // S directly neighbors O .
                   {{Subj("nsubj", 2), W("directly", "ADV", "advmod", 2),
                     W("neighbors", "VERB", "ROOT", -1), Obj("dobj", 2),
                     W(".", "PUNCT", "punct", 2)},
                    "neighbors"},
               },
               {"borders", "adjoins", "neighbors"}});
  return r;
}

double UnitDraw(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double Uniform(std::mt19937_64 &rng, double range) {
  return -range + 2.0 * range * UnitDraw(rng);
}

constexpr const char *kSyllables[] = {"ka", "lo", "mi", "ra", "ven", "tor",
                                      "sa", "del", "ni", "mar", "zu", "bel",
                                      "ro", "tan", "li", "gor", "pe", "dun"};

class NameMaker {
 public:
  explicit NameMaker(std::mt19937_64 &rng) : rng_(rng) {}

  std::string Fresh() {
    constexpr size_t kCount = std::size(kSyllables);
    while (true) {
      const int parts = 2 + static_cast<int>(UniformIndex(rng_, 2));
      std::string name;
      for (int i = 0; i < parts; ++i) {
        name += kSyllables[UniformIndex(rng_, kCount)];
      }
      name[0] = static_cast<char>(name[0] - 'a' + 'A');
      if (used_.insert(name).second) return name;
    }
  }

 private:
  std::mt19937_64 &rng_;
  std::set<std::string> used_;
};

using EntityName = std::vector<std::string>;

std::vector<EntityName> MakePool(EntityType type, int size, NameMaker &names) {
  std::vector<EntityName> pool;
  for (int i = 0; i < size; ++i) {
    if (type == EntityType::kPerson) {
      pool.push_back({names.Fresh(), names.Fresh()});
    } else {
      pool.push_back({names.Fresh()});
    }
  }
  return pool;
}

// Small pools so that every name recurs across several pairs; grown only
// when a relation needs more distinct pairs than the pool can supply.
int PoolSize(int pairs) {
  int n = 8;
  while (n * (n - 1) < pairs) ++n;
  return n;
}

std::string Joined(const EntityName &name) {
  std::string out;
  for (const std::string &part : name) {
    if (!out.empty()) out += ' ';
    out += part;
  }
  return out;
}

}  // namespace

const std::vector<RelationTemplate> &BuiltinRelations() {
  static const std::vector<RelationTemplate> relations = MakeBuiltins();
  return relations;
}

ParsedSentence Realize(const SentenceTemplate &t, const std::string &id,
                       const std::vector<std::string> &subject,
                       const std::vector<std::string> &object) {
  // New index of each template position's head-bearing token.
  std::vector<int> anchor(t.tokens.size());
  int next = 0;
  for (size_t i = 0; i < t.tokens.size(); ++i) {
    const TemplateToken &tok = t.tokens[i];
    const int width = tok.is_subject   ? static_cast<int>(subject.size())
                      : tok.is_object ? static_cast<int>(object.size())
                                      : 1;
    anchor[i] = next + width - 1;
    next += width;
  }

  ParsedSentence s;
  s.id = id;
  for (size_t i = 0; i < t.tokens.size(); ++i) {
    const TemplateToken &tok = t.tokens[i];
    const int head = tok.head < 0 ? -1 : anchor[tok.head];
    if (tok.is_subject || tok.is_object) {
      const auto &name = tok.is_subject ? subject : object;
      EntitySpan span;
      span.start = static_cast<int>(s.tokens.size());
      span.end = span.start + static_cast<int>(name.size());
      span.canonical = Joined(name);
      for (size_t k = 0; k + 1 < name.size(); ++k) {
        s.tokens.push_back(Token{name[k], "PROPN", "compound", anchor[i]});
      }
      s.tokens.push_back(Token{name.back(), tok.pos, tok.dep, head});
      (tok.is_subject ? s.subject : s.object) = std::move(span);
    } else {
      s.tokens.push_back(Token{tok.text, tok.pos, tok.dep, head});
    }
  }
  ValidateSentence(s);
  return s;
}

SynthCorpus Generate(const SynthOptions &options) {
  const auto &builtins = BuiltinRelations();
  if (options.relations < 1 ||
      options.relations > static_cast<int>(builtins.size())) {
    throw ValidationError("synth: relations must be in [1, " +
                          std::to_string(builtins.size()) + "]");
  }
  if (options.pairs < 1) throw ValidationError("synth: pairs must be >= 1");
  if (options.sentences < 2) {
    throw ValidationError("synth: sentences must be >= 2");
  }

  std::mt19937_64 rng(options.seed);
  NameMaker names(rng);
  const int pool_size = PoolSize(options.pairs);
  std::map<EntityType, std::vector<EntityName>> pools;
  for (EntityType type : {EntityType::kPerson, EntityType::kCity,
                          EntityType::kCountry, EntityType::kOrganization}) {
    pools[type] = MakePool(type, pool_size, names);
  }

  SynthCorpus corpus;
  std::set<PairKey> used;
  for (int r = 0; r < options.relations; ++r) {
    const RelationTemplate &rel = builtins[r];
    const auto &subjects = pools[rel.subject_type];
    const auto &objects = pools[rel.object_type];
    for (int p = 0; p < options.pairs; ++p) {
      EntityName subject, object;
      PairKey key;
      do {
        subject = subjects[UniformIndex(rng, subjects.size())];
        object = objects[UniformIndex(rng, objects.size())];
        key = {Joined(subject), Joined(object)};
      } while (key.first == key.second || used.count(key));
      used.insert(key);
      corpus.gold.emplace_back(key, rel.name);
      for (int k = 0; k < options.sentences; ++k) {
        const auto &tmpl = rel.templates[UniformIndex(rng, rel.templates.size())];
        const std::string id = rel.name + "-" + std::to_string(p) + "-" +
                               std::to_string(k);
        corpus.sentences.push_back(Realize(tmpl, id, subject, object));
      }
    }
  }

  // Toy vectors. Dimensions 0..3 are relation axes; keywords and relation
  // names sit on their relation's axis plus small noise in 4..15. Every
  // other template word gets a random vector confined to 4..15.
  std::map<std::string, int> axis;
  std::set<std::string> plain;
  for (int r = 0; r < static_cast<int>(builtins.size()); ++r) {
    const RelationTemplate &rel = builtins[r];
    axis[rel.name] = r;
    for (const std::string &w : rel.keywords) axis[w] = r;
    for (const SentenceTemplate &t : rel.templates) {
      for (const TemplateToken &tok : t.tokens) {
        if (!tok.is_subject && !tok.is_object) plain.insert(tok.text);
      }
    }
  }
  for (const auto &[word, r] : axis) plain.erase(word);

  std::mt19937_64 vec_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  for (const auto &[word, r] : axis) {
    std::vector<double> v(kToyVectorDim, 0.0);
    v[r] = 1.0;
    for (int d = 4; d < kToyVectorDim; ++d) v[d] = Uniform(vec_rng, 0.15);
    corpus.vector_tokens.push_back(word);
    corpus.vectors.push_back(std::move(v));
  }
  for (const std::string &word : plain) {
    std::vector<double> v(kToyVectorDim, 0.0);
    for (int d = 4; d < kToyVectorDim; ++d) v[d] = Uniform(vec_rng, 1.0);
    corpus.vector_tokens.push_back(word);
    corpus.vectors.push_back(std::move(v));
  }
  return corpus;
}

void WriteSynthCorpus(const SynthCorpus &corpus,
                      const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "corpus.jsonl", std::ios::binary);
    if (!out) throw ValidationError("cannot write " + (dir / "corpus.jsonl").string());
    for (const ParsedSentence &s : corpus.sentences) {
      out << FormatRecord(s) << '\n';
    }
  }
  {
    std::ofstream out(dir / "gold.jsonl", std::ios::binary);
    if (!out) throw ValidationError("cannot write " + (dir / "gold.jsonl").string());
    for (const auto &[pair, relation] : corpus.gold) {
      nlohmann::json j{{"pair", {pair.first, pair.second}},
                       {"relations", {relation}}};
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(dir / "embeddings.txt", std::ios::binary);
    if (!out) {
      throw ValidationError("cannot write " + (dir / "embeddings.txt").string());
    }
    out << corpus.vector_tokens.size() << ' ' << kToyVectorDim << '\n';
    for (size_t i = 0; i < corpus.vector_tokens.size(); ++i) {
      out << corpus.vector_tokens[i];
      for (double v : corpus.vectors[i]) out << ' ' << FormatDouble(v);
      out << '\n';
    }
  }
}

}  // namespace cure
