// Command-line entry point: one subcommand per pipeline stage plus
// `pipeline`, which runs them all.
//
// Exit codes: 0 success, 2 validation error, 3 runtime or numeric error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cure/config.h"
#include "cure/error.h"
#include "cure/pipeline.h"
#include "cure/synth.h"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Unsupervised relation extraction by shortest-path prediction"};
  app.require_subcommand(1);
  app.footer("Config keys (key = default):\n" + cure::DefaultsTable() +
             "\nCURE_THREADS caps the worker count.");

  cure::SynthOptions synth;
  std::string synth_dir;
  auto *synth_cmd = app.add_subcommand("synth", "Generate a planted-relation corpus");
  synth_cmd->add_option("--relations", synth.relations, "Relations (<= 4)")
      ->capture_default_str();
  synth_cmd->add_option("--pairs", synth.pairs, "Entity pairs per relation")
      ->capture_default_str();
  synth_cmd->add_option("--sentences", synth.sentences, "Sentences per pair")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--out-dir", synth_dir, "Output directory")->required();

  std::string corpus, paths_file, out;
  auto *extract_cmd =
      app.add_subcommand("extract-paths", "Extract shortest paths from a corpus");
  extract_cmd->add_option("--corpus", corpus, "Corpus (JSON Lines)")->required();
  extract_cmd->add_option("--out", out, "Path file to write")->required();

  std::string config_path, checkpoint, log_csv;
  std::vector<std::string> overrides;
  auto *train_cmd = app.add_subcommand("train", "Train the path encoder-decoder");
  train_cmd->add_option("--config", config_path, "key = value config file");
  train_cmd->add_option("--set", overrides, "key=value override (repeatable)");
  train_cmd->add_option("--paths-file", paths_file, "Path file")->required();
  train_cmd->add_option("--out-checkpoint", checkpoint, "Checkpoint to write")
      ->required();
  train_cmd->add_option("--log", log_csv, "Per-epoch loss CSV")->required();

  int min_paths = 1;
  auto *encode_cmd = app.add_subcommand("encode", "Compute relation vectors");
  encode_cmd->add_option("--checkpoint", checkpoint, "Trained checkpoint")
      ->required();
  encode_cmd->add_option("--paths-file", paths_file, "Path file")->required();
  encode_cmd->add_option("--out", out, "Vector file to write")->required();
  encode_cmd->add_option("--min-paths", min_paths, "Skip pairs with fewer paths")
      ->capture_default_str();

  std::string vectors_file, centroids;
  int k = 4;
  auto *cluster_cmd = app.add_subcommand("cluster", "Cluster relation vectors");
  cluster_cmd->add_option("--vectors", vectors_file, "Vector file")->required();
  cluster_cmd->add_option("--k", k, "Number of clusters")->required();
  cluster_cmd->add_option("--out", out, "Cluster assignment file")->required();
  cluster_cmd->add_option("--centroids", centroids,
                          "Centroid file (default: <out>.centroids)");

  std::string clusters_file, embeddings, method = "wvs", stopwords_path;
  int top = 3;
  auto *label_cmd = app.add_subcommand("label", "Label clusters with relation words");
  label_cmd->add_option("--clusters", clusters_file, "Cluster file")->required();
  label_cmd->add_option("--paths-file", paths_file, "Path file")->required();
  label_cmd->add_option("--embeddings", embeddings, "Pretrained vectors");
  label_cmd->add_option("--method", method, "wvs or cw")
      ->check(CLI::IsMember({"wvs", "cw"}))
      ->capture_default_str();
  label_cmd->add_option("--top", top, "Labels kept per cluster")
      ->capture_default_str();
  label_cmd->add_option("--stopwords", stopwords_path, "Stopword list");
  label_cmd->add_option("--out", out, "Label file")->required();

  std::string labels_file, gold;
  auto *eval_cmd = app.add_subcommand("evaluate", "Score clusters against gold");
  eval_cmd->add_option("--clusters", clusters_file, "Cluster file")->required();
  eval_cmd->add_option("--labels", labels_file, "Label file")->required();
  eval_cmd->add_option("--gold", gold, "Gold relations (JSON Lines)")->required();
  eval_cmd->add_option("--embeddings", embeddings,
                       "Vectors holding gold relation names")
      ->required();
  eval_cmd->add_option("--out", out, "CSV report")->required();

  auto *pipeline_cmd = app.add_subcommand("pipeline", "Run every stage");
  pipeline_cmd->add_option("--config", config_path, "key = value config file");
  pipeline_cmd->add_option("--set", overrides, "key=value override (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*synth_cmd) {
      cure::WriteSynthCorpus(cure::Generate(synth), synth_dir);
    } else if (*extract_cmd) {
      cure::StageExtractPaths(corpus, out);
    } else if (*train_cmd) {
      const cure::RunConfig config = cure::LoadConfig(config_path, overrides);
      cure::ValidateConfig(config);
      const cure::TrainLog log =
          cure::StageTrain(config, paths_file, checkpoint, log_csv);
      if (!log.epoch_loss.empty()) {
        std::cerr << "final epoch loss " << log.epoch_loss.back() << '\n';
      }
    } else if (*encode_cmd) {
      cure::StageEncode(checkpoint, paths_file, out, min_paths);
    } else if (*cluster_cmd) {
      cure::StageCluster(vectors_file, k, out,
                         centroids.empty() ? out + ".centroids" : centroids);
    } else if (*label_cmd) {
      if (method == "wvs" && embeddings.empty()) {
        throw cure::ValidationError("--embeddings is required for --method wvs");
      }
      const cure::Stopwords stopwords = stopwords_path.empty()
                                            ? cure::DefaultStopwords()
                                            : cure::LoadStopwords(stopwords_path);
      cure::StageLabel(clusters_file, paths_file, embeddings, method, top,
                       stopwords, out);
    } else if (*eval_cmd) {
      const cure::EvaluationReport report =
          cure::StageEvaluate(clusters_file, labels_file, gold, embeddings, out);
      std::cout << "rand_index " << report.rand_index << '\n';
    } else if (*pipeline_cmd) {
      const cure::RunConfig config = cure::LoadConfig(config_path, overrides);
      const cure::EvaluationReport report = cure::RunPipeline(config);
      std::cout << "rand_index " << report.rand_index << '\n';
      for (const cure::RelationScore &s : report.prf1.scores) {
        std::cout << s.relation << " P=" << s.precision << " R=" << s.recall
                  << " F1=" << s.f1 << '\n';
      }
    }
  } catch (const cure::ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
