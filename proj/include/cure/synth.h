#ifndef CURE_SYNTH_H_
#define CURE_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cure/corpus.h"

namespace cure {

enum class EntityType { kPerson, kCity, kCountry, kOrganization };

// One template token. Slot tokens (is_subject / is_object) are replaced by
// the entity name; multi-token names hang off their last token as compounds.
struct TemplateToken {
  std::string text;
  std::string pos;
  std::string dep;
  int head = -1;
  bool is_subject = false;
  bool is_object = false;
};

struct SentenceTemplate {
  std::vector<TemplateToken> tokens;
  std::string trigger;  // lies on the subject-object path
};

struct RelationTemplate {
  std::string name;  // gold relation name, also a token in the toy vectors
  EntityType subject_type;
  EntityType object_type;
  std::vector<SentenceTemplate> templates;
  // Content words this relation puts on its paths. They share the
  // relation's direction in the toy vectors.
  std::vector<std::string> keywords;
};

// capital, placeBirth, founders, neighborOf; three templates each.
const std::vector<RelationTemplate> &BuiltinRelations();

// Fills a template with entity names (each a list of tokens).
ParsedSentence Realize(const SentenceTemplate &t, const std::string &id,
                       const std::vector<std::string> &subject,
                       const std::vector<std::string> &object);

struct SynthOptions {
  int relations = 4;
  int pairs = 25;
  int sentences = 3;
  std::uint64_t seed = 7;
};

struct SynthCorpus {
  std::vector<ParsedSentence> sentences;
  std::vector<std::pair<PairKey, std::string>> gold;  // pair -> relation
  std::vector<std::string> vector_tokens;             // in file order
  std::vector<std::vector<double>> vectors;           // 16-dim toy vectors
};

// Deterministic for fixed options.
SynthCorpus Generate(const SynthOptions &options);

// Writes corpus.jsonl, gold.jsonl and embeddings.txt into dir.
void WriteSynthCorpus(const SynthCorpus &corpus,
                      const std::filesystem::path &dir);

inline constexpr int kToyVectorDim = 16;

}  // namespace cure

#endif  // CURE_SYNTH_H_
