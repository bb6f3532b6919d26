#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dnazen/common.hpp"
#include "dnazen/model.hpp"
#include "dnazen/training.hpp"

namespace dnazen::config {

// TOML subset: one-level [section] tables, bare keys, basic "strings",
// integers, floats, booleans, and single-line arrays of scalars. Comments
// and blank lines throughout; no dotted keys, nesting, or multi-line values.
struct TomlValue {
  enum class Kind { string, integer, floating, boolean, array };
  Kind kind = Kind::string;
  std::string str;
  int64_t integer = 0;
  double floating = 0.0;
  bool boolean = false;
  std::vector<TomlValue> items;
};

// Keys are flattened to "section.key" ("key" at top level).
using TomlTable = std::map<std::string, TomlValue>;

TomlTable parse_toml(std::string_view text);  // throws ParseError with line numbers

struct PathsConfig {
  std::string corpus;       // raw sequences, FASTA or one-per-line
  std::string token_vocab;  // BPE vocabulary JSON
  std::string ggram_vocab;  // G-gram vocabulary JSON-lines
  std::string checkpoint;   // model archive consumed by a command
  std::string dataset;      // labeled task directory (train/dev/test CSV)
  std::string out_dir;      // artifact directory produced by a command

  bool operator==(const PathsConfig&) const = default;
};

struct ExtractionConfig {
  double theta = 2.0;
  int min_len = 2;
  int max_len = 5;
  int64_t min_freq = 2;

  bool operator==(const ExtractionConfig&) const = default;
};

struct TokenizerConfig {
  int vocab_size = 512;

  bool operator==(const TokenizerConfig&) const = default;
};

// Everything a pipeline command needs, resolvable from (in rising precedence)
// defaults, a TOML file, DNAZEN_* environment variables, and command flags.
struct PipelineConfig {
  PathsConfig paths;
  model::ModelConfig model;
  train::TrainConfig training;  // seed is mirrored from the top-level seed
  ExtractionConfig extraction;
  TokenizerConfig tokenizer;
  uint64_t seed = 0;
  int workers = 1;

  bool operator==(const PipelineConfig&) const = default;
};

// Applies a parsed table; unknown keys and kind mismatches are errors.
void apply_toml(PipelineConfig& cfg, const TomlTable& table);

PipelineConfig load_file(const std::filesystem::path& path);

// Environment variable per field: DNAZEN_ + the flattened key upper-cased
// with '.' as '_' (seed -> DNAZEN_SEED, training.lr -> DNAZEN_TRAINING_LR).
// The lookup is injectable so tests need not mutate the process environment.
using EnvLookup = std::function<const char*(const std::string&)>;
void apply_env(PipelineConfig& cfg, const EnvLookup& lookup);
void apply_env(PipelineConfig& cfg);  // reads the process environment

// Effective-config echo; valid input for load_file/parse_toml.
std::string to_toml(const PipelineConfig& cfg);

}  // namespace dnazen::config
