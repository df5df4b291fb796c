#ifndef CURE_ENCDEC_H_
#define CURE_ENCDEC_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "cure/autodiff.h"
#include "cure/corpus.h"
#include "cure/vocab.h"

namespace cure {

struct ModelConfig {
  int n_h = 32;   // forward LSTM hidden size
  int n_h2 = 32;  // backward LSTM hidden size
  int n_g = 64;   // GRU hidden size, also the attention output size
  int n_l = 8;    // fixed path length
  int d_w = 50;
  int d_d = 16;
  int d_p = 16;
  int max_input_paths = 8;
  double learning_rate = 0.2;
  int epochs = 30;
  int batch_size = 1;
  std::uint64_t seed = 13;
  double clip_norm = 5.0;
  double init_range = 0.1;

  // Throws ValidationError naming the first bad field.
  void Validate() const;
  int block_size() const { return n_h + n_h2; }
  int relation_dim() const { return block_size() * n_l; }
  bool operator==(const ModelConfig &) const = default;
};

// A padded path mapped to vocabulary ids.
struct PathIds {
  std::vector<int> words;
  std::vector<int> deps;
  std::vector<int> poss;
  int true_length = 0;
};

// Parameter tensors bound as leaves on one tape.
struct BoundModel {
  Var emb_word, emb_dep, emb_pos;
  LstmParams forward, backward;
  Var attn_alpha, attn_alpha_bias, attn_beta;
  GruParams gru;
  Var out_w, out_b;
};

// Weights, vocabularies and shapes of the path encoder-decoder.
class Model {
 public:
  // All parameters start at zero.
  Model(const ModelConfig &config, Vocabularies vocab);

  // Uniform in [-init_range, init_range], drawn in parameter order.
  void InitUniform(std::uint64_t seed);

  const ModelConfig &config() const { return config_; }
  const Vocabularies &vocab() const { return vocab_; }
  ParameterSet &params() { return params_; }
  const ParameterSet &params() const { return params_; }
  int n_w() const { return vocab_.words.size(); }

  PathIds ToIds(const SspTriple &path) const;

  // Registers every parameter as a leaf. With grads == nullptr the leaves
  // have no gradient sinks; otherwise grads must parallel params().values().
  BoundModel Bind(Tape &tape, std::vector<Tensor> *grads = nullptr) const;

  void Save(const std::filesystem::path &path) const;
  static Model Load(const std::filesystem::path &path);

  bool operator==(const Model &o) const {
    return config_ == o.config_ && vocab_.words == o.vocab_.words &&
           vocab_.deps == o.vocab_.deps && vocab_.poss == o.vocab_.poss &&
           params_ == o.params_;
  }

 private:
  ModelConfig config_;
  Vocabularies vocab_;
  ParameterSet params_;
};

// Bi-LSTM over the n_l positions; returns the concatenation of the per-position
// (forward ⊕ backward) hidden states.
Var EncodePath(const BoundModel &m, const ModelConfig &config,
               const PathIds &path);

// Elementwise sum. Throws ValidationError on empty input.
Var Aggregate(std::span<const Var> encodings);
std::vector<double> Aggregate(std::span<const std::vector<double>> encodings);

// n_l word-logit vectors generated from the relation vector alone.
std::vector<Var> DecodePath(const BoundModel &m, const ModelConfig &config,
                            Var relation);

// Mean cross entropy over the target's true length.
Var SequenceLoss(std::span<const Var> logits, const PathIds &target);

// Encodes every input path, sums them, decodes, and scores against target.
Var TrainingLoss(const BoundModel &m, const ModelConfig &config,
                 std::span<const PathIds> inputs, const PathIds &target);

// Leave-one-out loss with `held_out` as the target and all other paths of
// the group as inputs. Throws ValidationError for groups of one path.
double GroupLoss(const Model &model, const PairGroup &group, int held_out);

// Relation vector over all paths of a group.
std::vector<double> InferRelationVector(const Model &model,
                                        const PairGroup &group);

struct TrainLog {
  std::vector<double> epoch_loss;  // mean example loss per epoch
};

// Called after every epoch with the 1-based epoch number.
using EpochCallback = std::function<void(int epoch, const Model &model)>;

// SGD on leave-one-out path prediction. Each epoch shuffles the groups, picks a
// held-out path per group, caps the inputs at max_input_paths by seeded
// subsampling, and steps once per batch of batch_size groups on the summed
// loss with clipped gradients. Throws NumericError on a non-finite loss.
TrainLog Train(Model &model, const std::vector<PairGroup> &groups,
               const EpochCallback &on_epoch = nullptr);

// Deterministic helpers shared by the trainer and the synthetic generator.
// Portable across standard libraries, unlike <random> distributions.
std::uint64_t UniformIndex(std::mt19937_64 &rng, std::uint64_t n);
template <typename T>
void SeededShuffle(std::vector<T> &items, std::mt19937_64 &rng) {
  for (size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[UniformIndex(rng, i)]);
  }
}

}  // namespace cure

#endif  // CURE_ENCDEC_H_
