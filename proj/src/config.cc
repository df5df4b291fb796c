#include "cure/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cure/error.h"

namespace cure {

namespace {

struct KeySpec {
  std::string name;
  std::string help;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

template <typename T>
T ParseNumber(const std::string &key, const std::string &value) {
  T out{};
  const char *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("config key '" + key + "': cannot parse '" + value +
                          "'");
  }
  return out;
}

template <typename T>
KeySpec Number(const std::string &name, const std::string &help,
               T RunConfig::*group_less, T ModelConfig::*in_model = nullptr) {
  KeySpec s;
  s.name = name;
  s.help = help;
  s.set = [=](RunConfig &c, const std::string &v) {
    const T parsed = ParseNumber<T>(name, v);
    if (in_model) c.model.*in_model = parsed;
    else c.*group_less = parsed;
  };
  s.get = [=](const RunConfig &c) {
    const T value = in_model ? c.model.*in_model : c.*group_less;
    if constexpr (std::is_floating_point_v<T>) {
      return FormatDouble(value);
    } else {
      return std::to_string(value);
    }
  };
  return s;
}

template <typename T>
KeySpec ModelNumber(const std::string &name, const std::string &help,
                    T ModelConfig::*field) {
  return Number<T>(name, help, nullptr, field);
}

KeySpec PathKey(const std::string &name, const std::string &help,
                std::filesystem::path RunConfig::*field) {
  return KeySpec{name, help,
                 [=](RunConfig &c, const std::string &v) { c.*field = v; },
                 [=](const RunConfig &c) { return (c.*field).string(); }};
}

const std::vector<KeySpec> &Specs() {
  static const std::vector<KeySpec> specs = {
      ModelNumber("n_h", "forward LSTM hidden size", &ModelConfig::n_h),
      ModelNumber("n_h2", "backward LSTM hidden size", &ModelConfig::n_h2),
      ModelNumber("n_g", "GRU hidden size", &ModelConfig::n_g),
      ModelNumber("n_l", "fixed path length", &ModelConfig::n_l),
      ModelNumber("d_w", "word embedding size", &ModelConfig::d_w),
      ModelNumber("d_d", "dependency-tag embedding size", &ModelConfig::d_d),
      ModelNumber("d_p", "POS-tag embedding size", &ModelConfig::d_p),
      ModelNumber("max_input_paths", "cap on encoder inputs per example",
                  &ModelConfig::max_input_paths),
      ModelNumber("learning_rate", "SGD step size", &ModelConfig::learning_rate),
      ModelNumber("epochs", "training epochs", &ModelConfig::epochs),
      ModelNumber("batch_size", "groups per SGD step", &ModelConfig::batch_size),
      ModelNumber("seed", "root random seed", &ModelConfig::seed),
      ModelNumber("clip_norm", "global gradient norm cap",
                  &ModelConfig::clip_norm),
      ModelNumber("init_range", "uniform init half-width",
                  &ModelConfig::init_range),
      Number<int>("k", "number of clusters", &RunConfig::k),
      Number<int>("min_freq", "minimum word count for the vocabulary",
                  &RunConfig::min_freq),
      Number<int>("min_paths", "minimum paths per training pair",
                  &RunConfig::min_paths),
      Number<int>("top", "labels kept per cluster", &RunConfig::top),
      KeySpec{"method", "labeling method, wvs or cw",
              [](RunConfig &c, const std::string &v) {
                if (v != "wvs" && v != "cw") {
                  throw ValidationError("config key 'method': expected wvs or "
                                        "cw, got '" + v + "'");
                }
                c.method = v;
              },
              [](const RunConfig &c) { return c.method; }},
      PathKey("stopwords", "stopword list (empty: built-in)",
              &RunConfig::stopwords),
      PathKey("corpus", "input corpus (JSON Lines)", &RunConfig::corpus),
      PathKey("embeddings", "pretrained word vectors", &RunConfig::embeddings),
      PathKey("gold", "gold relations (JSON Lines)", &RunConfig::gold),
      PathKey("work_dir", "output directory for pipeline artifacts",
              &RunConfig::work_dir),
  };
  return specs;
}

std::string Trim(const std::string &s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

int EditDistance(const std::string &a, const std::string &b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

const std::vector<std::string> &ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const KeySpec &s : Specs()) k.push_back(s.name);
    return k;
  }();
  return keys;
}

std::vector<std::pair<std::string, std::string>> ConfigValues(
    const RunConfig &config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const KeySpec &s : Specs()) out.emplace_back(s.name, s.get(config));
  return out;
}

std::string DefaultsTable() {
  const RunConfig defaults;
  std::ostringstream out;
  for (const KeySpec &s : Specs()) {
    out << "  " << s.name << " = " << s.get(defaults) << "  # " << s.help
        << '\n';
  }
  return out.str();
}

void ApplySetting(RunConfig &config, const std::string &key,
                  const std::string &value) {
  for (const KeySpec &s : Specs()) {
    if (s.name == key) {
      s.set(config, value);
      config.explicitly_set.insert(key);
      return;
    }
  }
  const std::string *nearest = nullptr;
  int best = 0;
  for (const std::string &k : ConfigKeys()) {
    const int d = EditDistance(key, k);
    if (nearest == nullptr || d < best) {
      nearest = &k;
      best = d;
    }
  }
  throw ValidationError("unknown config key '" + key + "' (did you mean '" +
                        *nearest + "'?)");
}

RunConfig LoadConfig(const std::filesystem::path &path,
                     const std::vector<std::string> &overrides) {
  RunConfig config;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = Trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
      }
      try {
        ApplySetting(config, Trim(line.substr(0, eq)),
                     Trim(line.substr(eq + 1)));
      } catch (const ValidationError &e) {
        throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                              ": " + e.what());
      }
    }
  }
  for (const std::string &o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("override '" + o + "' is not key=value");
    }
    ApplySetting(config, Trim(o.substr(0, eq)), Trim(o.substr(eq + 1)));
  }
  return config;
}

void RequireKeys(const RunConfig &config,
                 const std::vector<std::string> &keys) {
  for (const std::string &k : keys) {
    if (!config.explicitly_set.count(k)) {
      throw ValidationError("missing required key '" + k + "'");
    }
  }
}

void ValidateConfig(const RunConfig &config) {
  config.model.Validate();
  if (config.k < 1) throw ValidationError("k must be >= 1");
  if (config.min_freq < 1) throw ValidationError("min_freq must be >= 1");
  if (config.min_paths < 2) {
    throw ValidationError("min_paths must be >= 2 for training");
  }
  if (config.top < 1) throw ValidationError("top must be >= 1");
  for (const auto *p : {&config.stopwords, &config.corpus, &config.embeddings,
                        &config.gold}) {
    if (!p->empty() && !std::filesystem::exists(*p)) {
      throw ValidationError("file not found: " + p->string());
    }
  }
}

}  // namespace cure
