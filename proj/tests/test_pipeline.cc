#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "cure/error.h"
#include "cure/pipeline.h"
#include "cure/synth.h"
#include "doctest.h"
#include "json.hpp"
#include "support.h"

using namespace cure;

namespace {

int RunCli(const std::string &args) {
  const std::string cmd =
      std::string(CURE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// A corpus small enough that a handful of epochs run in well under a second.
RunConfig SmallRun(const testing::ScratchDir &dir, const std::string &work) {
  SynthOptions o;
  o.relations = 2;
  o.pairs = 6;
  o.sentences = 3;
  WriteSynthCorpus(Generate(o), dir.path());
  RunConfig c = LoadConfig(
      "", {"corpus=" + (dir / "corpus.jsonl").string(),
           "embeddings=" + (dir / "embeddings.txt").string(),
           "gold=" + (dir / "gold.jsonl").string(),
           "work_dir=" + (dir / work).string(), "n_h=4", "n_h2=4", "n_g=6",
           "d_w=4", "d_d=3", "d_p=3", "epochs=3", "k=2", "min_freq=1"});
  return c;
}

}  // namespace

TEST_CASE("sha256 of known inputs") {
  testing::ScratchDir dir("sha");
  testing::WriteFile(dir / "empty", "");
  testing::WriteFile(dir / "abc", "abc");
  CHECK(Sha256File(dir / "empty") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(Sha256File(dir / "abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("encode without a checkpoint") {
  testing::ScratchDir dir("pipe");
  testing::WriteFile(dir / "paths.jsonl", "");
  CHECK_THROWS_WITH_AS(
      StageEncode(dir / "model.ckpt", dir / "paths.jsonl", dir / "v.jsonl"),
      doctest::Contains("checkpoint not found"), ValidationError);
}

TEST_CASE("pipeline needs its inputs") {
  CHECK_THROWS_WITH_AS(RunPipeline(RunConfig{}),
                       doctest::Contains("missing required key"), ValidationError);
}

TEST_CASE("small pipeline is reproducible") {
  testing::ScratchDir dir("pipe");
  const RunConfig first = SmallRun(dir, "a");
  RunConfig second = first;
  second.work_dir = dir / "b";
  const EvaluationReport report = RunPipeline(first);
  RunPipeline(second);

  using A = PipelineArtifacts;
  for (const char *name : {A::kPaths, A::kCheckpoint, A::kTrainLog, A::kVectors,
                           A::kClusters, A::kCentroids, A::kLabels,
                           A::kEvaluation}) {
    CAPTURE(name);
    CHECK(testing::ReadFile(first.work_dir / name) ==
          testing::ReadFile(second.work_dir / name));
  }

  const auto manifest =
      nlohmann::json::parse(testing::ReadFile(first.work_dir / A::kManifest));
  CHECK(manifest.at("seed").get<std::uint64_t>() == first.model.seed);
  REQUIRE(manifest.at("stages").size() == 6);
  CHECK(manifest["stages"][0]["name"] == "extract-paths");
  CHECK(manifest["stages"][1]["artifacts"][A::kCheckpoint] ==
        Sha256File(first.work_dir / A::kCheckpoint));

  std::istringstream csv(testing::ReadFile(first.work_dir / A::kEvaluation));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "relation,recall,precision,f1");
  int rows = 0;
  std::string last;
  while (std::getline(csv, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 3);
  CHECK(last.rfind("rand_index,", 0) == 0);
  CHECK(report.rand_index >= 0.0);
  CHECK(report.rand_index <= 1.0);

  std::istringstream log(testing::ReadFile(first.work_dir / A::kTrainLog));
  std::getline(log, line);
  CHECK(line == "epoch,loss");
  int epochs = 0;
  while (std::getline(log, line)) ++epochs;
  CHECK(epochs == 3);

  CHECK(ReadClusterFile(first.work_dir / A::kClusters).size() == 12);
  CHECK(ReadVectorFile(first.work_dir / A::kVectors).size() == 12);
}

TEST_CASE("cli exit codes") {
  testing::ScratchDir dir("cli");
  CHECK(RunCli("") == 2);
  CHECK(RunCli("--help") == 0);
  CHECK(RunCli("bogus") == 2);
  CHECK(RunCli("synth --out-dir " + dir.path().string() + " --pairs 4") == 0);
  CHECK(RunCli("extract-paths --corpus " + (dir / "corpus.jsonl").string() +
               " --out " + (dir / "paths.jsonl").string()) == 0);
  CHECK(RunCli("extract-paths --corpus " + (dir / "missing.jsonl").string() +
               " --out " + (dir / "p2.jsonl").string()) == 2);
  CHECK(RunCli("encode --checkpoint " + (dir / "none.ckpt").string() +
               " --paths-file " + (dir / "paths.jsonl").string() + " --out " +
               (dir / "v.jsonl").string()) == 2);
  CHECK(RunCli("train --paths-file " + (dir / "paths.jsonl").string() +
               " --out-checkpoint " + (dir / "m.ckpt").string() + " --log " +
               (dir / "log.csv").string() + " --set n_hh=3") == 2);
  CHECK(RunCli("train --paths-file " + (dir / "paths.jsonl").string() +
               " --out-checkpoint " + (dir / "m.ckpt").string() + " --log " +
               (dir / "log.csv").string() +
               " --set epochs=1 --set n_h=3 --set n_h2=3 --set n_g=4") == 0);
  CHECK(RunCli("encode --checkpoint " + (dir / "m.ckpt").string() +
               " --paths-file " + (dir / "paths.jsonl").string() + " --out " +
               (dir / "v.jsonl").string()) == 0);
  CHECK(RunCli("cluster --vectors " + (dir / "v.jsonl").string() + " --k 4 --out " +
               (dir / "c.jsonl").string()) == 0);
  CHECK(std::filesystem::exists(dir / "c.jsonl.centroids"));
  CHECK(RunCli("cluster --vectors " + (dir / "v.jsonl").string() +
               " --k 1000 --out " + (dir / "c2.jsonl").string()) == 2);
  CHECK(RunCli("label --clusters " + (dir / "c.jsonl").string() + " --paths-file " +
               (dir / "paths.jsonl").string() + " --method wvs --out " +
               (dir / "l.jsonl").string()) == 2);
  CHECK(RunCli("label --clusters " + (dir / "c.jsonl").string() + " --paths-file " +
               (dir / "paths.jsonl").string() + " --embeddings " +
               (dir / "embeddings.txt").string() + " --out " +
               (dir / "l.jsonl").string()) == 0);
  CHECK(RunCli("evaluate --clusters " + (dir / "c.jsonl").string() + " --labels " +
               (dir / "l.jsonl").string() + " --gold " +
               (dir / "gold.jsonl").string() + " --embeddings " +
               (dir / "embeddings.txt").string() + " --out " +
               (dir / "e.csv").string()) == 0);
}
