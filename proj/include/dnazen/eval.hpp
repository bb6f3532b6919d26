#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnazen/corpus.hpp"
#include "dnazen/ggram.hpp"
#include "dnazen/model.hpp"
#include "dnazen/tokenizer.hpp"

namespace dnazen::eval {

struct ConfusionCounts {
  int classes = 0;
  std::vector<int64_t> table;  // gold-major, classes*classes cells

  static ConfusionCounts zeros(int classes);
  void add(int gold, int predicted, int64_t n = 1);
  int64_t at(int gold, int predicted) const {
    return table[static_cast<std::size_t>(gold) * classes + predicted];
  }
  int64_t total() const;
};

// Multiclass Matthews correlation, covariance form. Degenerate marginals
// (single predicted or single gold class) give 0 so means stay defined.
double mcc(const ConfusionCounts& counts);

// CLS + tokens + SEP, truncated to max_positions, with capped ggram matches:
// the shared inference-side input preparation.
struct PreparedExample {
  std::vector<int> token_ids;
  ggram::GGramMatchSet matches;
};
PreparedExample prepare_example(const corpus::Sequence& seq, const bpe::TokenVocab& tokvocab,
                                const ggram::GGramMatcher& matcher, int max_positions,
                                int max_ggrams);

int predict(const model::ModelState& state, const PreparedExample& ex);

struct ReportRow {
  std::string task;
  std::string dataset;
  std::string split;
  std::string metric;           // "mcc-covariance"
  std::vector<uint64_t> seeds;  // one per evaluated checkpoint
  std::vector<double> values;   // parallel to seeds
  double mean = 0.0;
  double avg_ggrams = 0.0;      // average matched ggrams per record
};

struct EvalReport {
  std::vector<ReportRow> rows;
};

// One row per split; several checkpoints produce per-seed values plus the
// mean. Every dataset's class count must equal the model's.
EvalReport evaluate(std::span<const model::ModelState> models, std::span<const uint64_t> seeds,
                    std::span<const corpus::LabeledDataset> splits,
                    const bpe::TokenVocab& tokvocab, const ggram::GGramVocab& gvocab,
                    const std::string& task = "", const std::string& dataset = "");

std::string report_tsv(const EvalReport& report);
std::string report_json(const EvalReport& report);

struct AttentionEntry {
  int ggram_id = 0;
  std::string text;
  double weight = 0.0;
  bool motif = false;  // text contains the configured motif
};

struct LayerAttention {
  std::vector<AttentionEntry> entries;  // weight descending, id ascending on ties
};

struct ExampleAttention {
  int example_index = 0;
  bool has_matches = false;
  std::string notice;  // set when the example matched nothing
  std::vector<LayerAttention> layers;
};

// Mean ggram-encoder attention per layer for each example, sorted by weight.
// top_k > 0 keeps only the strongest entries per layer.
std::vector<ExampleAttention> attention_report(const model::ModelState& state,
                                               std::span<const corpus::Sequence> examples,
                                               const bpe::TokenVocab& tokvocab,
                                               const ggram::GGramVocab& gvocab,
                                               const std::string& motif = "", int top_k = 0);

}  // namespace dnazen::eval
