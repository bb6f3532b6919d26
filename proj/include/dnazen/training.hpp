#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnazen/corpus.hpp"
#include "dnazen/eval.hpp"
#include "dnazen/ggram.hpp"
#include "dnazen/model.hpp"
#include "dnazen/tokenizer.hpp"

namespace dnazen::train {

struct TrainConfig {
  double mask_ratio = 0.15;
  double mask_prob = 0.8;    // masked position becomes MASK
  double random_prob = 0.1;  // ... becomes a random ordinary token
  double keep_prob = 0.1;    // ... keeps its original id
  double lr = 5e-5;
  int batch_size = 8;
  int epochs = 3;
  int max_steps = 0;         // 0 = run every epoch to completion
  int checkpoint_every = 0;  // steps between periodic checkpoints; 0 = final only
  uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  bool operator==(const TrainConfig&) const = default;
};

// One pre-training example after whole-ggram masking.
struct MaskedExample {
  std::vector<int> input_ids;
  std::vector<int> labels;  // original id at masked positions, ignore elsewhere
  std::vector<int> masked_positions;   // ascending
  std::vector<int> seed_positions;     // ascending; the stage-1 draws
  std::vector<int> withheld_ggram_ids;  // ascending, unique; see kept_matches
  ggram::GGramMatchSet kept_matches;   // matches whose ggram id is not withheld
};

// Seeds mask positions uniformly among ordinary tokens, extends each seed to
// every match covering it, and stops once ceil(mask_ratio*N) positions are
// masked (overshoot bounded by the final seed's expansion). Masked positions
// independently become MASK / random / unchanged per the config split.
// Matches whose every token ended up masked are withheld: their ggram ids are
// excluded from the encoder input and their matches dropped from the kept
// set. Specials are never masked and never drawn as replacements.
MaskedExample whole_ggram_mask(std::span<const int> tokens,
                               const ggram::GGramMatchSet& matches,
                               const bpe::TokenVocab& vocab, const TrainConfig& cfg,
                               uint64_t seed);

struct MlmLossResult {
  nn::Tensor loss;
  bool skipped = false;  // no masked positions; loss is the constant 0
  int positions = 0;
};

// Mean cross entropy over positions whose label is not the ignore marker.
MlmLossResult mlm_loss(const nn::Tensor& logits, std::span<const int> labels);

struct StepMetric {
  int64_t step = 0;  // 1-based
  double loss = 0.0;
  double lr = 0.0;
  double masked_frac = 0.0;
};

std::string metrics_jsonl(std::span<const StepMetric> metrics);

struct PretrainResult {
  model::ModelState state;
  std::vector<StepMetric> metrics;
  bool aborted = false;  // non-finite loss; training stopped early
  std::filesystem::path final_checkpoint;  // empty when no file was written
};

// Masked-language-model pre-training over raw sequences: tokenize, match,
// mask, forward, Adam. Deterministic for a fixed seed. When out_dir is
// nonempty, writes metrics.jsonl, periodic checkpoints, and model.dzck.
// A non-finite loss aborts immediately, leaving the newest on-disk
// checkpoint as the last good state. An optional init state (cloned, not
// mutated) replaces the seeded random initialization. on_step observes each
// recorded metric as training progresses.
PretrainResult pretrain(const std::vector<corpus::Sequence>& sequences,
                        const bpe::TokenVocab& tokvocab, const ggram::GGramVocab& gvocab,
                        const model::ModelConfig& mcfg, const TrainConfig& cfg,
                        const std::filesystem::path& out_dir = {},
                        const model::ModelState* init = nullptr,
                        const std::function<void(const StepMetric&)>& on_step = {});

struct TaskData {
  corpus::LabeledDataset train;
  corpus::LabeledDataset dev;
  std::optional<corpus::LabeledDataset> test;
};

struct FinetuneResult {
  model::ModelState state;  // parameters at the best dev epoch
  double best_dev_mcc = 0.0;
  std::vector<double> dev_history;  // dev MCC after each epoch
  std::optional<double> test_mcc;   // absent without a test split
  std::vector<StepMetric> metrics;
  uint64_t seed = 0;
};

// Supervised classification from an initial (typically pre-trained) state.
// No masking; the full match set is supplied. Model selection keeps the
// epoch with the best dev MCC and reports test MCC for that state.
FinetuneResult finetune(const TaskData& data, const model::ModelState& init,
                        const bpe::TokenVocab& tokvocab, const ggram::GGramVocab& gvocab,
                        const TrainConfig& cfg);

struct MultiSeedSummary {
  std::vector<FinetuneResult> runs;
  double mean_dev_mcc = 0.0;
  std::optional<double> mean_test_mcc;
};

MultiSeedSummary finetune_seeds(const TaskData& data, const model::ModelState& init,
                                const bpe::TokenVocab& tokvocab,
                                const ggram::GGramVocab& gvocab, const TrainConfig& cfg,
                                std::span<const uint64_t> seeds);

}  // namespace dnazen::train
