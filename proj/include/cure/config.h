#ifndef CURE_CONFIG_H_
#define CURE_CONFIG_H_

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "cure/encdec.h"

namespace cure {

struct RunConfig {
  ModelConfig model;
  int k = 4;
  int min_freq = 2;
  int min_paths = 2;
  int top = 3;
  std::string method = "wvs";
  std::filesystem::path stopwords;  // empty: built-in list
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
  std::filesystem::path gold;
  std::filesystem::path work_dir;

  // Keys assigned from a file or an override, for required-key checks.
  std::set<std::string> explicitly_set;
};

// Every accepted key, in the order of DefaultsTable().
const std::vector<std::string> &ConfigKeys();

// (key, value) for every key, formatted as the config file would hold it.
std::vector<std::pair<std::string, std::string>> ConfigValues(
    const RunConfig &config);

// "key = default  # meaning" lines for --help.
std::string DefaultsTable();

// Sets one key. Throws ValidationError for unknown keys (naming the closest
// known key) and for unparsable or out-of-range values.
void ApplySetting(RunConfig &config, const std::string &key,
                  const std::string &value);

// Reads "key = value" lines ('#' starts a comment) from `path` when it is
// non-empty, then applies each "key=value" override in order.
RunConfig LoadConfig(const std::filesystem::path &path,
                     const std::vector<std::string> &overrides = {});

// Throws ValidationError("missing required key '<key>'") for the first key
// that was never set.
void RequireKeys(const RunConfig &config, const std::vector<std::string> &keys);

// Checks the numeric ranges and that referenced input files exist.
void ValidateConfig(const RunConfig &config);

// Edit distance, used for "did you mean" hints.
int EditDistance(const std::string &a, const std::string &b);

}  // namespace cure

#endif  // CURE_CONFIG_H_
