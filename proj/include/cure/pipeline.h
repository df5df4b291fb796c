#ifndef CURE_PIPELINE_H_
#define CURE_PIPELINE_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cure/cluster.h"
#include "cure/config.h"
#include "cure/corpus.h"
#include "cure/evaluation.h"
#include "cure/label.h"

namespace cure {

namespace fs = std::filesystem;

// Stage entry points. Each reads its inputs from disk and writes its
// artifact; the CLI subcommands and the pipeline share them.

void StageExtractPaths(const fs::path &corpus, const fs::path &out);

// Trains on the groups of `paths_file` with at least min_paths paths.
// Writes the checkpoint after every epoch and an "epoch,loss" CSV.
TrainLog StageTrain(const RunConfig &config, const fs::path &paths_file,
                    const fs::path &out_checkpoint, const fs::path &log_csv);

// One {"pair": [s, o], "vector": [...]} line per group with at least
// min_paths paths.
void StageEncode(const fs::path &checkpoint, const fs::path &paths_file,
                 const fs::path &out, int min_paths = 1);

// {"cluster": id, "pair": [s, o]} per input vector, in input order, plus
// {"cluster": id, "size": n, "centroid": [...]} lines in `centroids`.
void StageCluster(const fs::path &vectors_file, int k, const fs::path &out,
                  const fs::path &centroids);

// {"cluster": id, "labels": [[word, score], ...]} per cluster.
void StageLabel(const fs::path &clusters_file, const fs::path &paths_file,
                const fs::path &embeddings, const std::string &method, int top,
                const Stopwords &stopwords, const fs::path &out);

struct EvaluationReport {
  std::map<int, std::string> cluster_relation;
  Prf1Result prf1;
  double rand_index = 0.0;
};

// CSV "relation,recall,precision,f1" rows, then "rand_index,<value>".
EvaluationReport StageEvaluate(const fs::path &clusters_file,
                               const fs::path &labels_file,
                               const fs::path &gold_file,
                               const fs::path &embeddings,
                               const fs::path &out);

// Artifact names inside work_dir, in stage order.
struct PipelineArtifacts {
  static constexpr const char *kPaths = "paths.jsonl";
  static constexpr const char *kCheckpoint = "model.ckpt";
  static constexpr const char *kTrainLog = "train_log.csv";
  static constexpr const char *kVectors = "vectors.jsonl";
  static constexpr const char *kClusters = "clusters.jsonl";
  static constexpr const char *kCentroids = "centroids.jsonl";
  static constexpr const char *kLabels = "labels.jsonl";
  static constexpr const char *kEvaluation = "evaluation.csv";
  static constexpr const char *kManifest = "manifest.json";
};

// extract-paths -> train -> encode -> cluster -> label -> evaluate inside
// config.work_dir, then manifest.json with per-artifact SHA-256, the seed
// and per-stage wall time. Needs corpus, embeddings, gold and work_dir.
EvaluationReport RunPipeline(const RunConfig &config);

// Lowercase hex SHA-256 of a file's bytes.
std::string Sha256File(const fs::path &path);

// Readers for the stage formats.
std::vector<std::pair<PairKey, std::vector<double>>> ReadVectorFile(
    const fs::path &path);
std::vector<std::pair<PairKey, int>> ReadClusterFile(const fs::path &path);
std::map<int, LabelCandidates> ReadLabelFile(const fs::path &path);
GoldAssignment ReadGoldFile(const fs::path &path);

}  // namespace cure

#endif  // CURE_PIPELINE_H_
