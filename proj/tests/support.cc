#include "support.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "cure/corpus.h"

namespace testing {

fs::path DataPath(const std::string &name) {
  return fs::path(CURE_TEST_DATA_DIR) / name;
}

ScratchDir::ScratchDir(const std::string &tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("cure-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void WriteFile(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

cure::ParsedSentence ReaganSentence() {
  std::ifstream in(DataPath("reagan.jsonl"));
  std::string line;
  std::getline(in, line);
  return cure::ParseRecord(line);
}

namespace {

const char *const kDeps[] = {"nsubj", "nsubjpass", "csubj", "dobj", "pobj",
                             "iobj",  "obj",       "amod",  "nmod", "appos",
                             "poss",  "compound",  "det",   "prep", "advmod",
                             "aux",   "cc",        "conj",  "punct"};
const char *const kPos[] = {"NOUN", "VERB", "ADP", "DET", "PROPN", "ADJ", "ADV"};

int Draw(std::mt19937_64 &rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::string SpanText(const cure::ParsedSentence &s, int start, int end) {
  std::string out;
  for (int i = start; i < end; ++i) {
    if (!out.empty()) out += ' ';
    out += s.tokens[i].text;
  }
  return out;
}

}  // namespace

cure::ParsedSentence RandomSentence(std::mt19937_64 &rng, int max_tokens) {
  const int n = Draw(rng, 2, max_tokens);
  cure::ParsedSentence s;
  s.id = "random";
  s.tokens.resize(n);

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  s.tokens[order[0]].head = -1;
  for (int k = 1; k < n; ++k) {
    s.tokens[order[k]].head = order[Draw(rng, 0, k - 1)];
  }
  for (int i = 0; i < n; ++i) {
    cure::Token &t = s.tokens[i];
    t.text = "w" + std::to_string(i);
    t.pos = kPos[Draw(rng, 0, static_cast<int>(std::size(kPos)) - 1)];
    t.dep = t.head < 0 ? "ROOT"
                       : kDeps[Draw(rng, 0, static_cast<int>(std::size(kDeps)) - 1)];
  }

  // Two disjoint spans, subject first or second at random.
  int a_start, a_end, b_start, b_end;
  do {
    a_start = Draw(rng, 0, n - 1);
    a_end = Draw(rng, a_start + 1, std::min(n, a_start + 3));
    b_start = Draw(rng, 0, n - 1);
    b_end = Draw(rng, b_start + 1, std::min(n, b_start + 3));
  } while (a_start < b_end && b_start < a_end);
  s.subject = {a_start, a_end, SpanText(s, a_start, a_end)};
  s.object = {b_start, b_end, SpanText(s, b_start, b_end)};
  return s;
}

int OracleRepresentative(const cure::ParsedSentence &s,
                         const cure::EntitySpan &span) {
  const std::vector<std::vector<std::string>> classes = {
      {"nsubj", "nsubjpass", "csubj"},
      {"dobj", "pobj", "iobj", "obj"},
      {"amod", "nmod", "appos", "poss"}};
  for (const auto &tags : classes) {
    for (int i = span.start; i < span.end; ++i) {
      if (std::find(tags.begin(), tags.end(), s.tokens[i].dep) != tags.end()) {
        return i;
      }
    }
  }
  int chosen = -1;
  for (int i = span.start; i < span.end; ++i) {
    const int h = s.tokens[i].head;
    if (h < span.start || h >= span.end) chosen = i;
  }
  return chosen;
}

std::vector<int> BfsPath(const cure::ParsedSentence &s, int from, int to) {
  const int n = static_cast<int>(s.tokens.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    const int h = s.tokens[i].head;
    if (h >= 0) {
      adj[i].push_back(h);
      adj[h].push_back(i);
    }
  }
  std::vector<int> prev(n, -2);
  std::deque<int> queue{from};
  prev[from] = -1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (prev[v] == -2) {
        prev[v] = u;
        queue.push_back(v);
      }
    }
  }
  std::vector<int> path;
  for (int v = to; v != -1; v = prev[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

cure::Dendrogram BruteForceHac(const std::vector<std::vector<double>> &points) {
  const int n = static_cast<int>(points.size());
  std::map<int, std::vector<int>> active;
  for (int i = 0; i < n; ++i) active[i] = {i};
  cure::Dendrogram d;
  d.leaves = n;
  for (int step = 0; step + 1 < n; ++step) {
    int best_a = -1, best_b = -1;
    double best = 0.0;
    for (auto a = active.begin(); a != active.end(); ++a) {
      for (auto b = std::next(a); b != active.end(); ++b) {
        double total = 0.0;
        for (int i : a->second) {
          for (int j : b->second) {
            double sq = 0.0;
            for (size_t k = 0; k < points[i].size(); ++k) {
              const double diff = points[i][k] - points[j][k];
              sq += diff * diff;
            }
            total += std::sqrt(sq);
          }
        }
        const double link =
            total / static_cast<double>(a->second.size() * b->second.size());
        if (best_a < 0 || link < best) {
          best = link;
          best_a = a->first;
          best_b = b->first;
        }
      }
    }
    std::vector<int> merged = active[best_a];
    merged.insert(merged.end(), active[best_b].begin(), active[best_b].end());
    active.erase(best_a);
    active.erase(best_b);
    d.merges.push_back({best_a, best_b, best, static_cast<int>(merged.size())});
    active[n + step] = std::move(merged);
  }
  return d;
}

double BruteForceRandIndex(const cure::Partition &a, const cure::Partition &b) {
  std::vector<std::string> items;
  for (const auto &[key, block] : a) items.push_back(key);
  long agree = 0, total = 0;
  for (size_t i = 0; i < items.size(); ++i) {
    for (size_t j = i + 1; j < items.size(); ++j) {
      const bool together_a = a.at(items[i]) == a.at(items[j]);
      const bool together_b = b.at(items[i]) == b.at(items[j]);
      agree += together_a == together_b;
      ++total;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(total);
}

std::vector<std::string> LongDoubleWvsRanking(
    const cure::WordCounts &counts,
    const std::vector<std::pair<std::string, std::vector<double>>> &vectors) {
  using LD = long double;
  std::map<std::string, std::vector<LD>> vec;
  for (const auto &[word, v] : vectors) vec[word] = {v.begin(), v.end()};

  std::vector<std::string> words;
  for (const auto &[word, count] : counts) {
    if (vec.count(word)) words.push_back(word);
  }
  auto cosine = [](const std::vector<LD> &x, const std::vector<LD> &y) {
    LD dot = 0, nx = 0, ny = 0;
    for (size_t k = 0; k < x.size(); ++k) {
      dot += x[k] * y[k];
      nx += x[k] * x[k];
      ny += y[k] * y[k];
    }
    if (nx == 0 || ny == 0) return LD(0);
    return dot / (std::sqrt(nx) * std::sqrt(ny));
  };

  std::vector<LD> raw;
  for (const std::string &wi : words) {
    LD spread = 0;
    for (const std::string &wj : words) {
      if (wj != wi) spread += 1 - cosine(vec[wi], vec[wj]);
    }
    raw.push_back(counts.at(wi) * spread);
  }
  const LD lo = *std::min_element(raw.begin(), raw.end());
  const LD hi = *std::max_element(raw.begin(), raw.end());
  std::vector<LD> v(vec[words[0]].size(), 0);
  for (size_t i = 0; i < words.size(); ++i) {
    const LD weight = hi > lo ? (raw[i] - lo) / (hi - lo) : LD(1);
    for (size_t k = 0; k < v.size(); ++k) v[k] += weight * vec[words[i]][k];
  }
  std::vector<std::pair<LD, std::string>> scored;
  for (const std::string &w : words) scored.emplace_back(cosine(vec[w], v), w);
  std::sort(scored.begin(), scored.end(), [](const auto &x, const auto &y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<std::string> ranking;
  for (const auto &[score, w] : scored) ranking.push_back(w);
  return ranking;
}

cure::Model ToyModel(const cure::ModelConfig &config, int n_w,
                     std::uint64_t seed) {
  std::vector<std::string> words, deps, poss;
  for (int i = 0; i + 2 < n_w; ++i) words.push_back("w" + std::to_string(i));
  for (int i = 0; i < 4; ++i) deps.push_back("d" + std::to_string(i));
  for (int i = 0; i < 3; ++i) poss.push_back("p" + std::to_string(i));
  cure::Model model(config, cure::Vocabularies{cure::Vocab(words),
                                               cure::Vocab(deps),
                                               cure::Vocab(poss)});
  if (config.init_range > 0) model.InitUniform(seed);
  return model;
}

cure::SspTriple ToyPath(std::mt19937_64 &rng, int n_w, int max_len) {
  const int len = Draw(rng, 1, max_len);
  cure::SspTriple t;
  for (int i = 0; i < len; ++i) {
    t.words.push_back("w" + std::to_string(Draw(rng, 0, n_w - 3)));
    t.deps.push_back("d" + std::to_string(Draw(rng, 0, 3)));
    t.poss.push_back("p" + std::to_string(Draw(rng, 0, 2)));
  }
  return t;
}

std::map<std::string, double> EncoderDecoderGradientErrors(std::uint64_t seed) {
  cure::ModelConfig config;
  config.n_h = 4;
  config.n_h2 = 4;
  config.n_g = 8;
  config.n_l = 5;
  config.d_w = 4;
  config.d_d = 3;
  config.d_p = 2;
  config.init_range = 0.5;
  const int n_w = 20;
  cure::Model model = ToyModel(config, n_w, seed);

  std::mt19937_64 rng(seed + 1);
  // The second input is longer than n_l, so truncation is exercised too.
  cure::SspTriple long_path = ToyPath(rng, n_w, 1);
  while (long_path.size() < 7) {
    const cure::SspTriple more = ToyPath(rng, n_w, 3);
    long_path.words.insert(long_path.words.end(), more.words.begin(),
                           more.words.end());
    long_path.deps.insert(long_path.deps.end(), more.deps.begin(),
                          more.deps.end());
    long_path.poss.insert(long_path.poss.end(), more.poss.begin(),
                          more.poss.end());
  }
  const std::vector<cure::PathIds> inputs = {
      model.ToIds(ToyPath(rng, n_w, 4)), model.ToIds(long_path)};
  const cure::PathIds target = model.ToIds(ToyPath(rng, n_w, 5));

  auto loss_value = [&]() {
    cure::Tape tape;
    const cure::BoundModel m = model.Bind(tape);
    return cure::TrainingLoss(m, config, inputs, target).value()[0];
  };

  std::vector<cure::Tensor> grads;
  for (const cure::Tensor &v : model.params().values()) {
    grads.emplace_back(v.rows, v.cols);
  }
  {
    cure::Tape tape;
    const cure::BoundModel m = model.Bind(tape, &grads);
    tape.Backward(cure::TrainingLoss(m, config, inputs, target));
  }

  std::map<std::string, double> worst;
  const double h = 1e-4;
  auto &values = model.params().values();
  const auto &names = model.params().names();
  for (size_t k = 0; k < values.size(); ++k) {
    double err = 0.0;
    for (int i = 0; i < values[k].size(); ++i) {
      const double saved = values[k][i];
      values[k][i] = saved + h;
      const double up = loss_value();
      values[k][i] = saved - h;
      const double down = loss_value();
      values[k][i] = saved;
      err = std::max(err, RelativeError(grads[k][i], (up - down) / (2 * h)));
    }
    worst[names[k]] = err;
  }
  return worst;
}

double RelativeError(double analytic, double numeric) {
  const double scale =
      std::max({std::fabs(analytic), std::fabs(numeric), 1e-5});
  return std::fabs(analytic - numeric) / scale;
}

}  // namespace testing
