#include "cure/pipeline.h"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "cure/encdec.h"
#include "cure/error.h"
#include "cure/parallel.h"
#include "json.hpp"

namespace cure {

using nlohmann::json;

namespace {

std::ofstream OpenOut(const fs::path &path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

// Calls fn(line, lineno) for each nonblank line, prefixing errors with the
// location.
template <typename Fn>
void ForEachJsonLine(const fs::path &path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw ValidationError("file not found: " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception &e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": " + e.what());
    } catch (const ValidationError &e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": " + e.what());
    }
  }
}

PairKey PairFromJson(const json &j) {
  const json &pair = j.at("pair");
  if (!pair.is_array() || pair.size() != 2) {
    throw ValidationError("pair must be a two-element array");
  }
  return {pair[0].get<std::string>(), pair[1].get<std::string>()};
}

json PairToJson(const PairKey &pair) { return json{pair.first, pair.second}; }

std::vector<std::string> GoldRelationNames(const GoldAssignment &gold) {
  std::set<std::string> names;
  for (const auto &[item, relations] : gold) {
    names.insert(relations.begin(), relations.end());
  }
  return {names.begin(), names.end()};
}

}  // namespace

std::string Sha256File(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot hash " + path.string());
  EVP_MD_CTX *ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::vector<std::pair<PairKey, std::vector<double>>> ReadVectorFile(
    const fs::path &path) {
  std::vector<std::pair<PairKey, std::vector<double>>> out;
  ForEachJsonLine(path, [&](const json &j) {
    out.emplace_back(PairFromJson(j), j.at("vector").get<std::vector<double>>());
  });
  return out;
}

std::vector<std::pair<PairKey, int>> ReadClusterFile(const fs::path &path) {
  std::vector<std::pair<PairKey, int>> out;
  ForEachJsonLine(path, [&](const json &j) {
    out.emplace_back(PairFromJson(j), j.at("cluster").get<int>());
  });
  return out;
}

std::map<int, LabelCandidates> ReadLabelFile(const fs::path &path) {
  std::map<int, LabelCandidates> out;
  ForEachJsonLine(path, [&](const json &j) {
    LabelCandidates labels;
    for (const json &entry : j.at("labels")) {
      labels.ranked.emplace_back(entry.at(0).get<std::string>(),
                                 entry.at(1).get<double>());
    }
    out[j.at("cluster").get<int>()] = std::move(labels);
  });
  return out;
}

GoldAssignment ReadGoldFile(const fs::path &path) {
  GoldAssignment out;
  ForEachJsonLine(path, [&](const json &j) {
    auto relations = j.at("relations").get<std::vector<std::string>>();
    if (relations.empty()) throw ValidationError("empty relation list");
    for (const std::string &r : relations) {
      if (r.empty()) throw ValidationError("empty relation name");
    }
    auto &slot = out[JoinPairKey(PairFromJson(j))];
    slot.insert(relations.begin(), relations.end());
  });
  return out;
}

void StageExtractPaths(const fs::path &corpus, const fs::path &out) {
  const std::vector<ParsedSentence> sentences = ParseCorpus(corpus);
  WritePathFile(out, ExtractPaths(sentences));
}

TrainLog StageTrain(const RunConfig &config, const fs::path &paths_file,
                    const fs::path &out_checkpoint, const fs::path &log_csv) {
  const std::vector<PairGroup> groups =
      GroupPairs(ReadPathFile(paths_file), config.min_paths);
  if (groups.empty()) {
    throw ValidationError("no entity pair has at least " +
                          std::to_string(config.min_paths) + " paths");
  }
  std::vector<SspTriple> all_paths;
  for (const PairGroup &g : groups) {
    all_paths.insert(all_paths.end(), g.paths.begin(), g.paths.end());
  }
  Model model(config.model, BuildVocab(all_paths, config.min_freq));
  model.InitUniform(config.model.seed);
  model.Save(out_checkpoint);

  auto log_out = OpenOut(log_csv);
  log_out << "epoch,loss\n";
  TrainLog log = Train(model, groups, [&](int epoch, const Model &m) {
    m.Save(out_checkpoint);
    (void)epoch;
  });
  for (size_t e = 0; e < log.epoch_loss.size(); ++e) {
    log_out << (e + 1) << ',' << FormatDouble(log.epoch_loss[e]) << '\n';
  }
  return log;
}

void StageEncode(const fs::path &checkpoint, const fs::path &paths_file,
                 const fs::path &out, int min_paths) {
  if (!fs::exists(checkpoint)) {
    throw ValidationError("checkpoint not found: " + checkpoint.string());
  }
  const Model model = Model::Load(checkpoint);
  const std::vector<PairGroup> groups =
      GroupPairs(ReadPathFile(paths_file), min_paths);
  std::vector<std::vector<double>> vectors(groups.size());
  ParallelFor(static_cast<int>(groups.size()), [&](int i) {
    vectors[i] = InferRelationVector(model, groups[i]);
  });
  auto file = OpenOut(out);
  for (size_t i = 0; i < groups.size(); ++i) {
    file << json{{"pair", PairToJson(groups[i].pair)}, {"vector", vectors[i]}}
                .dump()
         << '\n';
  }
}

void StageCluster(const fs::path &vectors_file, int k, const fs::path &out,
                  const fs::path &centroids) {
  const auto entries = ReadVectorFile(vectors_file);
  std::vector<std::vector<double>> vectors;
  for (const auto &[pair, v] : entries) vectors.push_back(v);
  if (vectors.size() < 2) {
    throw ValidationError("cluster: need at least 2 vectors");
  }
  const std::vector<Cluster> clusters = Cut(Hac(vectors), vectors, k);
  std::vector<int> assignment(vectors.size());
  for (const Cluster &c : clusters) {
    for (int m : c.members) assignment[m] = c.id;
  }
  auto file = OpenOut(out);
  for (size_t i = 0; i < entries.size(); ++i) {
    file << json{{"cluster", assignment[i]}, {"pair", PairToJson(entries[i].first)}}
                .dump()
         << '\n';
  }
  auto cfile = OpenOut(centroids);
  for (const Cluster &c : clusters) {
    cfile << json{{"cluster", c.id},
                  {"size", c.members.size()},
                  {"centroid", c.centroid}}
                 .dump()
          << '\n';
  }
}

void StageLabel(const fs::path &clusters_file, const fs::path &paths_file,
                const fs::path &embeddings, const std::string &method, int top,
                const Stopwords &stopwords, const fs::path &out) {
  if (method != "wvs" && method != "cw") {
    throw ValidationError("label: method must be wvs or cw");
  }
  const auto assignment = ReadClusterFile(clusters_file);
  std::map<PairKey, std::vector<SspTriple>> paths_by_pair;
  for (PathRecord &r : ReadPathFile(paths_file)) {
    paths_by_pair[r.pair].push_back(std::move(r.path));
  }
  PretrainedVectors vectors;
  if (method == "wvs") vectors = LoadPretrained(embeddings);

  std::map<int, std::vector<SspTriple>> member_paths;
  for (const auto &[pair, cluster] : assignment) {
    auto it = paths_by_pair.find(pair);
    if (it == paths_by_pair.end()) {
      throw ValidationError("label: no paths for pair (" + pair.first + ", " +
                            pair.second + ")");
    }
    auto &dst = member_paths[cluster];
    dst.insert(dst.end(), it->second.begin(), it->second.end());
  }

  auto file = OpenOut(out);
  for (const auto &[cluster, paths] : member_paths) {
    json labels = json::array();
    try {
      const WordCounts candidates = CandidateSet(paths, stopwords);
      const LabelCandidates ranked = method == "wvs"
                                         ? WvsLabel(candidates, vectors)
                                         : CwLabel(candidates);
      for (size_t i = 0; i < ranked.ranked.size() && static_cast<int>(i) < top;
           ++i) {
        labels.push_back(json{ranked.ranked[i].first, ranked.ranked[i].second});
      }
    } catch (const ValidationError &e) {
      std::cerr << "warning: cluster " << cluster << " has no label: "
                << e.what() << '\n';
    }
    file << json{{"cluster", cluster}, {"labels", labels}}.dump() << '\n';
  }
}

EvaluationReport StageEvaluate(const fs::path &clusters_file,
                               const fs::path &labels_file,
                               const fs::path &gold_file,
                               const fs::path &embeddings,
                               const fs::path &out) {
  const auto assignment = ReadClusterFile(clusters_file);
  const auto labels = ReadLabelFile(labels_file);
  const GoldAssignment gold = ReadGoldFile(gold_file);
  const PretrainedVectors vectors = LoadPretrained(embeddings);
  const std::vector<std::string> relations = GoldRelationNames(gold);

  EvaluationReport report;
  for (const auto &[cluster, label] : labels) {
    if (label.ranked.empty()) continue;
    try {
      report.cluster_relation[cluster] = MatchToGold(label, relations, vectors);
    } catch (const ValidationError &e) {
      std::cerr << "warning: cluster " << cluster
                << " not matched to a gold relation: " << e.what() << '\n';
    }
  }

  Partition predicted_cluster, gold_partition, predicted_relation;
  for (const auto &[pair, cluster] : assignment) {
    const std::string key = JoinPairKey(pair);
    auto g = gold.find(key);
    if (g == gold.end()) {
      throw ValidationError("evaluate: pair (" + pair.first + ", " +
                            pair.second + ") missing from gold");
    }
    predicted_cluster[key] = std::to_string(cluster);
    gold_partition[key] = *g->second.begin();
    auto r = report.cluster_relation.find(cluster);
    if (r != report.cluster_relation.end()) predicted_relation[key] = r->second;
  }
  GoldAssignment evaluated_gold;
  for (const auto &[key, block] : gold_partition) {
    evaluated_gold[key] = gold.at(key);
  }
  report.prf1 = Prf1(predicted_relation, evaluated_gold);
  for (const std::string &w : report.prf1.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  report.rand_index = RandIndex(predicted_cluster, gold_partition);

  auto file = OpenOut(out);
  file << "relation,recall,precision,f1\n";
  for (const RelationScore &s : report.prf1.scores) {
    file << s.relation << ',' << FormatDouble(s.recall) << ','
         << FormatDouble(s.precision) << ',' << FormatDouble(s.f1) << '\n';
  }
  file << "rand_index," << FormatDouble(report.rand_index) << '\n';
  return report;
}

EvaluationReport RunPipeline(const RunConfig &config) {
  RequireKeys(config, {"corpus", "embeddings", "gold", "work_dir"});
  ValidateConfig(config);
  const fs::path dir = config.work_dir;
  fs::create_directories(dir);
  using A = PipelineArtifacts;
  const Stopwords stopwords = config.stopwords.empty()
                                  ? DefaultStopwords()
                                  : LoadStopwords(config.stopwords);

  json stages = json::array();
  EvaluationReport report;
  auto run = [&](const char *name, std::vector<const char *> artifacts,
                 const std::function<void()> &body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const ValidationError &e) {
      throw ValidationError(std::string("stage ") + name + ": " + e.what());
    } catch (const NumericError &e) {
      throw NumericError(std::string("stage ") + name + ": " + e.what());
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    json hashes = json::object();
    for (const char *a : artifacts) hashes[a] = Sha256File(dir / a);
    stages.push_back(
        json{{"name", name}, {"millis", elapsed.count()}, {"artifacts", hashes}});
  };

  run("extract-paths", {A::kPaths},
      [&] { StageExtractPaths(config.corpus, dir / A::kPaths); });
  run("train", {A::kCheckpoint, A::kTrainLog}, [&] {
    StageTrain(config, dir / A::kPaths, dir / A::kCheckpoint,
               dir / A::kTrainLog);
  });
  run("encode", {A::kVectors}, [&] {
    StageEncode(dir / A::kCheckpoint, dir / A::kPaths, dir / A::kVectors);
  });
  run("cluster", {A::kClusters, A::kCentroids}, [&] {
    StageCluster(dir / A::kVectors, config.k, dir / A::kClusters,
                 dir / A::kCentroids);
  });
  run("label", {A::kLabels}, [&] {
    StageLabel(dir / A::kClusters, dir / A::kPaths, config.embeddings,
               config.method, config.top, stopwords, dir / A::kLabels);
  });
  run("evaluate", {A::kEvaluation}, [&] {
    report = StageEvaluate(dir / A::kClusters, dir / A::kLabels, config.gold,
                           config.embeddings, dir / A::kEvaluation);
  });

  json cfg = json::object();
  for (const auto &[key, value] : ConfigValues(config)) cfg[key] = value;
  json manifest{{"seed", config.model.seed},
                {"config", cfg},
                {"inputs",
                 {{"corpus", Sha256File(config.corpus)},
                  {"embeddings", Sha256File(config.embeddings)},
                  {"gold", Sha256File(config.gold)}}},
                {"stages", stages}};
  auto file = OpenOut(dir / A::kManifest);
  file << manifest.dump(2) << '\n';
  return report;
}

}  // namespace cure
