#include "cure/encdec.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <fstream>
#include <sstream>

#include "cure/error.h"
#include "cure/parallel.h"

namespace cure {

namespace {

constexpr const char *kCheckpointHeader = "CURE-MODEL v1";

void RequirePositive(int value, const char *name) {
  if (value <= 0) {
    throw ValidationError(std::string(name) + " must be positive, got " +
                          std::to_string(value));
  }
}

void AddLstm(ParameterSet &ps, const std::string &prefix, int hidden,
             int input) {
  for (const char *gate : {"o", "f", "i", "c"}) {
    ps.Add(prefix + ".w_" + gate, hidden, hidden);
    ps.Add(prefix + ".u_" + gate, hidden, input);
    ps.Add(prefix + ".b_" + gate, hidden, 1);
  }
}

}  // namespace

void ModelConfig::Validate() const {
  RequirePositive(n_h, "n_h");
  RequirePositive(n_h2, "n_h2");
  RequirePositive(n_g, "n_g");
  RequirePositive(d_w, "d_w");
  RequirePositive(d_d, "d_d");
  RequirePositive(d_p, "d_p");
  RequirePositive(max_input_paths, "max_input_paths");
  RequirePositive(batch_size, "batch_size");
  if (n_l < 2) throw ValidationError("n_l must be >= 2");
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw ValidationError("learning_rate must be positive");
  }
  if (!(clip_norm > 0.0)) throw ValidationError("clip_norm must be positive");
  if (!(init_range >= 0.0)) throw ValidationError("init_range must be >= 0");
}

Model::Model(const ModelConfig &config, Vocabularies vocab)
    : config_(config), vocab_(std::move(vocab)) {
  config_.Validate();
  const int input = config_.d_w + config_.d_d + config_.d_p;
  params_.Add("emb.word", vocab_.words.size(), config_.d_w);
  params_.Add("emb.dep", vocab_.deps.size(), config_.d_d);
  params_.Add("emb.pos", vocab_.poss.size(), config_.d_p);
  AddLstm(params_, "lstm.fwd", config_.n_h, input);
  AddLstm(params_, "lstm.bwd", config_.n_h2, input);
  params_.Add("attn.alpha.w", config_.n_l, config_.n_g);
  params_.Add("attn.alpha.b", config_.n_l, 1);
  params_.Add("attn.beta.w", config_.n_g, config_.block_size() + config_.n_g);
  for (const char *gate : {"z", "r", "h"}) {
    params_.Add(std::string("gru.w_") + gate, config_.n_g, config_.n_g);
    params_.Add(std::string("gru.u_") + gate, config_.n_g, config_.n_g);
    params_.Add(std::string("gru.b_") + gate, config_.n_g, 1);
  }
  params_.Add("out.w", vocab_.words.size(), config_.n_g);
  params_.Add("out.b", vocab_.words.size(), 1);
}

void Model::InitUniform(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (Tensor &t : params_.values()) FillUniform(t, config_.init_range, rng);
}

PathIds Model::ToIds(const SspTriple &path) const {
  ValidateTriple(path);
  const PaddedPath padded = PadOrTruncate(path, config_.n_l);
  PathIds ids;
  ids.true_length = padded.true_length;
  for (int i = 0; i < config_.n_l; ++i) {
    ids.words.push_back(vocab_.words.Lookup(padded.path.words[i]));
    ids.deps.push_back(vocab_.deps.Lookup(padded.path.deps[i]));
    ids.poss.push_back(vocab_.poss.Lookup(padded.path.poss[i]));
  }
  return ids;
}

BoundModel Model::Bind(Tape &tape, std::vector<Tensor> *grads) const {
  const auto &names = params_.names();
  const auto &values = params_.values();
  std::map<std::string, Var> leaf;
  for (size_t k = 0; k < names.size(); ++k) {
    Tensor *sink = grads ? &(*grads)[k] : nullptr;
    leaf[names[k]] = tape.Leaf(values[k], sink);
  }
  auto lstm = [&](const std::string &p) {
    return LstmParams{leaf[p + ".w_o"], leaf[p + ".u_o"], leaf[p + ".b_o"],
                      leaf[p + ".w_f"], leaf[p + ".u_f"], leaf[p + ".b_f"],
                      leaf[p + ".w_i"], leaf[p + ".u_i"], leaf[p + ".b_i"],
                      leaf[p + ".w_c"], leaf[p + ".u_c"], leaf[p + ".b_c"]};
  };
  BoundModel m;
  m.emb_word = leaf["emb.word"];
  m.emb_dep = leaf["emb.dep"];
  m.emb_pos = leaf["emb.pos"];
  m.forward = lstm("lstm.fwd");
  m.backward = lstm("lstm.bwd");
  m.attn_alpha = leaf["attn.alpha.w"];
  m.attn_alpha_bias = leaf["attn.alpha.b"];
  m.attn_beta = leaf["attn.beta.w"];
  m.gru = GruParams{leaf["gru.w_z"], leaf["gru.u_z"], leaf["gru.b_z"],
                    leaf["gru.w_r"], leaf["gru.u_r"], leaf["gru.b_r"],
                    leaf["gru.w_h"], leaf["gru.u_h"], leaf["gru.b_h"]};
  m.out_w = leaf["out.w"];
  m.out_b = leaf["out.b"];
  return m;
}

Var EncodePath(const BoundModel &m, const ModelConfig &config,
               const PathIds &path) {
  const int n = config.n_l;
  if (static_cast<int>(path.words.size()) != n ||
      static_cast<int>(path.deps.size()) != n ||
      static_cast<int>(path.poss.size()) != n) {
    throw ValidationError("encode: path length differs from n_l");
  }
  Tape &tape = *m.emb_word.tape;
  std::vector<Var> inputs;
  for (int i = 0; i < n; ++i) {
    const Var parts[] = {Row(m.emb_word, path.words[i]),
                         Row(m.emb_dep, path.deps[i]),
                         Row(m.emb_pos, path.poss[i])};
    inputs.push_back(Concat(parts));
  }

  std::vector<Var> forward(n), backward(n);
  LstmState state{tape.Constant(Tensor(config.n_h, 1)),
                  tape.Constant(Tensor(config.n_h, 1))};
  for (int i = 0; i < n; ++i) {
    state = LstmStep(inputs[i], state, m.forward);
    forward[i] = state.h;
  }
  state = LstmState{tape.Constant(Tensor(config.n_h2, 1)),
                    tape.Constant(Tensor(config.n_h2, 1))};
  for (int i = n - 1; i >= 0; --i) {
    state = LstmStep(inputs[i], state, m.backward);
    backward[i] = state.h;
  }

  std::vector<Var> blocks;
  for (int i = 0; i < n; ++i) {
    blocks.push_back(forward[i]);
    blocks.push_back(backward[i]);
  }
  return Concat(blocks);
}

Var Aggregate(std::span<const Var> encodings) {
  if (encodings.empty()) throw ValidationError("aggregate: no encodings");
  Var total = encodings[0];
  for (size_t j = 1; j < encodings.size(); ++j) total = Add(total, encodings[j]);
  return total;
}

std::vector<double> Aggregate(std::span<const std::vector<double>> encodings) {
  if (encodings.empty()) throw ValidationError("aggregate: no encodings");
  std::vector<double> total = encodings[0];
  for (size_t j = 1; j < encodings.size(); ++j) {
    if (encodings[j].size() != total.size()) {
      throw ValidationError("aggregate: dimension mismatch");
    }
    for (size_t i = 0; i < total.size(); ++i) total[i] += encodings[j][i];
  }
  return total;
}

std::vector<Var> DecodePath(const BoundModel &m, const ModelConfig &config,
                            Var relation) {
  if (relation.size() != config.relation_dim()) {
    throw ValidationError("decode: relation vector has dimension " +
                          std::to_string(relation.size()) + ", expected " +
                          std::to_string(config.relation_dim()));
  }
  Tape &tape = *relation.tape;
  Var hidden = tape.Constant(Tensor(config.n_g, 1));
  Var query = tape.Constant(Tensor(config.n_g, 1));
  std::vector<Var> logits;
  for (int i = 0; i < config.n_l; ++i) {
    Var scores = Add(MatVec(m.attn_alpha, hidden), m.attn_alpha_bias);
    Var context = WeightedBlockSum(Softmax(scores), relation);
    const Var joined[] = {context, query};
    query = MatVec(m.attn_beta, Concat(joined));
    hidden = GruStep(query, hidden, m.gru);
    logits.push_back(Add(MatVec(m.out_w, hidden), m.out_b));
  }
  return logits;
}

Var SequenceLoss(std::span<const Var> logits, const PathIds &target) {
  if (target.true_length < 1 ||
      target.true_length > static_cast<int>(logits.size())) {
    throw ValidationError("loss: target true length out of range");
  }
  Var total = SoftmaxCrossEntropy(logits[0], target.words[0]);
  for (int i = 1; i < target.true_length; ++i) {
    total = Add(total, SoftmaxCrossEntropy(logits[i], target.words[i]));
  }
  return Scale(total, 1.0 / target.true_length);
}

Var TrainingLoss(const BoundModel &m, const ModelConfig &config,
                 std::span<const PathIds> inputs, const PathIds &target) {
  std::vector<Var> encodings;
  for (const PathIds &p : inputs) encodings.push_back(EncodePath(m, config, p));
  const std::vector<Var> logits = DecodePath(m, config, Aggregate(encodings));
  return SequenceLoss(logits, target);
}

double GroupLoss(const Model &model, const PairGroup &group, int held_out) {
  if (group.paths.size() < 2) {
    throw ValidationError("training loss needs a group with at least 2 paths");
  }
  if (held_out < 0 || held_out >= static_cast<int>(group.paths.size())) {
    throw ValidationError("held-out index out of range");
  }
  std::vector<PathIds> inputs;
  for (int j = 0; j < static_cast<int>(group.paths.size()); ++j) {
    if (j != held_out) inputs.push_back(model.ToIds(group.paths[j]));
  }
  Tape tape;
  const BoundModel m = model.Bind(tape);
  return TrainingLoss(m, model.config(), inputs,
                      model.ToIds(group.paths[held_out]))
      .value()[0];
}

std::vector<double> InferRelationVector(const Model &model,
                                        const PairGroup &group) {
  if (group.paths.empty()) throw ValidationError("group has no paths");
  Tape tape;
  const BoundModel m = model.Bind(tape);
  std::vector<Var> encodings;
  for (const SspTriple &p : group.paths) {
    encodings.push_back(EncodePath(m, model.config(), model.ToIds(p)));
  }
  return Aggregate(encodings).value().data;
}

std::uint64_t UniformIndex(std::mt19937_64 &rng, std::uint64_t n) {
  return rng() % n;
}

namespace {

struct Example {
  std::vector<PathIds> inputs;
  PathIds target;
};

Example MakeExample(const Model &model, const PairGroup &group,
                    std::mt19937_64 &rng) {
  const int count = static_cast<int>(group.paths.size());
  const int held_out = static_cast<int>(UniformIndex(rng, count));
  std::vector<int> others;
  for (int j = 0; j < count; ++j) {
    if (j != held_out) others.push_back(j);
  }
  const int cap = model.config().max_input_paths;
  if (static_cast<int>(others.size()) > cap) {
    SeededShuffle(others, rng);
    others.resize(cap);
    std::sort(others.begin(), others.end());
  }
  Example ex;
  for (int j : others) ex.inputs.push_back(model.ToIds(group.paths[j]));
  ex.target = model.ToIds(group.paths[held_out]);
  return ex;
}

}  // namespace

TrainLog Train(Model &model, const std::vector<PairGroup> &groups,
               const EpochCallback &on_epoch) {
  const ModelConfig &config = model.config();
  if (groups.empty()) throw ValidationError("train: no pair groups");
  for (const PairGroup &g : groups) {
    if (g.paths.size() < 2) {
      throw ValidationError("train: group (" + g.pair.first + ", " +
                            g.pair.second + ") has fewer than 2 paths");
    }
  }

  // Separate stream from InitUniform, which callers seed with config.seed.
  std::mt19937_64 rng(config.seed ^ 0x5851f42d4c957f2dULL);
  ParameterSet &params = model.params();
  TrainLog log;
  std::vector<int> order(groups.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    SeededShuffle(order, rng);
    double epoch_total = 0.0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      const int batch = static_cast<int>(end - start);
      // Sampling stays sequential so the draw order never depends on threads.
      std::vector<Example> examples;
      for (size_t b = start; b < end; ++b) {
        examples.push_back(MakeExample(model, groups[order[b]], rng));
      }

      std::vector<std::vector<Tensor>> grads(batch);
      std::vector<double> losses(batch);
      const Model &frozen = model;
      ParallelFor(batch, [&](int b) {
        grads[b].reserve(params.values().size());
        for (const Tensor &v : frozen.params().values()) {
          grads[b].emplace_back(v.rows, v.cols);
        }
        Tape tape;
        const BoundModel m = frozen.Bind(tape, &grads[b]);
        Var loss = TrainingLoss(m, config, examples[b].inputs,
                                examples[b].target);
        tape.Backward(loss);
        losses[b] = loss.value()[0];
      });

      params.ZeroGrads();
      for (int b = 0; b < batch; ++b) {
        if (!std::isfinite(losses[b])) {
          throw NumericError("train: non-finite loss in epoch " +
                             std::to_string(epoch));
        }
        epoch_total += losses[b];
        for (size_t k = 0; k < grads[b].size(); ++k) {
          auto &dst = params.grads()[k].data;
          const auto &src = grads[b][k].data;
          for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        }
      }
      params.ClipGrads(config.clip_norm);
      params.SgdStep(config.learning_rate);
    }
    log.epoch_loss.push_back(epoch_total / static_cast<double>(groups.size()));
    if (on_epoch) on_epoch(epoch, model);
  }
  return log;
}

void Model::Save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint " + path.string());
  out << kCheckpointHeader << '\n';
  const ModelConfig &c = config_;
  out << "config n_h " << c.n_h << '\n'
      << "config n_h2 " << c.n_h2 << '\n'
      << "config n_g " << c.n_g << '\n'
      << "config n_l " << c.n_l << '\n'
      << "config d_w " << c.d_w << '\n'
      << "config d_d " << c.d_d << '\n'
      << "config d_p " << c.d_p << '\n'
      << "config max_input_paths " << c.max_input_paths << '\n'
      << "config learning_rate " << FormatDouble(c.learning_rate) << '\n'
      << "config epochs " << c.epochs << '\n'
      << "config batch_size " << c.batch_size << '\n'
      << "config seed " << c.seed << '\n'
      << "config clip_norm " << FormatDouble(c.clip_norm) << '\n'
      << "config init_range " << FormatDouble(c.init_range) << '\n';
  auto vocab = [&](const char *name, const Vocab &v) {
    out << "vocab " << name << ' ' << v.size() << '\n';
    for (const std::string &s : v.symbols()) {
      if (s.find('\n') != std::string::npos) {
        throw ValidationError("vocabulary symbol contains a newline");
      }
      out << s << '\n';
    }
  };
  vocab("words", vocab_.words);
  vocab("deps", vocab_.deps);
  vocab("poss", vocab_.poss);
  params_.WriteBlocks(out);
  if (!out) throw ValidationError("failed writing checkpoint " + path.string());
}

Model Model::Load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("checkpoint not found: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointHeader) {
    throw ValidationError(path.string() + ": not a CURE-MODEL v1 checkpoint");
  }

  ModelConfig c;
  std::map<std::string, std::vector<std::string>> vocabs;
  std::map<std::string, Tensor> tensors;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    if (kind == "config") {
      std::string key, value;
      fields >> key >> value;
      try {
        if (key == "n_h") c.n_h = std::stoi(value);
        else if (key == "n_h2") c.n_h2 = std::stoi(value);
        else if (key == "n_g") c.n_g = std::stoi(value);
        else if (key == "n_l") c.n_l = std::stoi(value);
        else if (key == "d_w") c.d_w = std::stoi(value);
        else if (key == "d_d") c.d_d = std::stoi(value);
        else if (key == "d_p") c.d_p = std::stoi(value);
        else if (key == "max_input_paths") c.max_input_paths = std::stoi(value);
        else if (key == "learning_rate") c.learning_rate = std::stod(value);
        else if (key == "epochs") c.epochs = std::stoi(value);
        else if (key == "batch_size") c.batch_size = std::stoi(value);
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "clip_norm") c.clip_norm = std::stod(value);
        else if (key == "init_range") c.init_range = std::stod(value);
        else throw ValidationError("unknown config key " + key);
      } catch (const std::logic_error &) {
        throw ValidationError(path.string() + ": bad config line '" + line +
                              "'");
      }
    } else if (kind == "vocab") {
      std::string name;
      int count = -1;
      fields >> name >> count;
      if (count < 2) throw ValidationError("bad vocab header '" + line + "'");
      std::vector<std::string> symbols;
      for (int i = 0; i < count; ++i) {
        std::string symbol;
        if (!std::getline(in, symbol)) {
          throw ValidationError("truncated vocabulary " + name);
        }
        symbols.push_back(std::move(symbol));
      }
      vocabs[name] = std::move(symbols);
    } else {
      std::string name;
      Tensor value;
      ParameterSet::ReadBlock(in, line, &name, &value);
      tensors[name] = std::move(value);
    }
  }

  for (const char *name : {"words", "deps", "poss"}) {
    if (!vocabs.count(name)) {
      throw ValidationError(path.string() + ": missing vocabulary " + name);
    }
  }
  Model model(c, Vocabularies{Vocab(vocabs["words"]), Vocab(vocabs["deps"]),
                              Vocab(vocabs["poss"])});
  ParameterSet &ps = model.params();
  for (size_t k = 0; k < ps.names().size(); ++k) {
    auto it = tensors.find(ps.names()[k]);
    if (it == tensors.end()) {
      throw ValidationError(path.string() + ": missing parameter " +
                            ps.names()[k]);
    }
    if (!it->second.SameShape(ps.values()[k])) {
      throw ValidationError(path.string() + ": parameter " + ps.names()[k] +
                            " has the wrong shape");
    }
    ps.values()[k] = std::move(it->second);
    tensors.erase(it);
  }
  if (!tensors.empty()) {
    throw ValidationError(path.string() + ": unexpected parameter " +
                          tensors.begin()->first);
  }
  return model;
}

}  // namespace cure
