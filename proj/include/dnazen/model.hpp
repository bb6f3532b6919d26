#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dnazen/ggram.hpp"
#include "dnazen/rng.hpp"
#include "dnazen/tensor.hpp"
#include "dnazen/transformer.hpp"

namespace dnazen::model {

struct ModelConfig {
  int hidden = 64;
  int token_layers = 4;
  int ggram_layers = 2;  // must not exceed token_layers
  int heads = 4;
  int token_vocab = 0;
  int ggram_vocab = 0;
  int max_positions = 128;  // longest token sequence
  int max_ggrams = 64;      // most matches fed to the ggram encoder
  int num_classes = 2;

  void validate() const;  // throws ConfigError
  bool operator==(const ModelConfig&) const = default;
};

// Dual encoder: a position-free ggram encoder feeding additive per-layer
// enhancements into the token encoder, plus MLM and classification heads.
struct ModelState {
  ModelConfig config;
  nn::Tensor token_embedding;     // [token_vocab, hidden]
  nn::Tensor position_embedding;  // [max_positions, hidden]
  nn::Tensor ggram_embedding;     // [ggram_vocab, hidden]
  std::vector<nn::LayerParams> ggram_encoder;  // ggram_layers blocks
  std::vector<nn::LayerParams> token_encoder;  // token_layers blocks
  nn::Tensor mlm_w, mlm_b;  // hidden -> token_vocab
  nn::Tensor cls_w, cls_b;  // hidden -> num_classes

  // Stable iteration order shared by the optimizer and checkpoints.
  std::vector<std::pair<std::string, nn::Tensor>> named() const;
  std::vector<nn::Tensor> parameters() const;
};

ModelState make_model(const ModelConfig& config, Rng& rng);

// Deep copy with fresh storage for every parameter.
ModelState clone(const ModelState& state);

// Intermediate representations captured during a forward pass.
struct ForwardTrace {
  std::vector<nn::Tensor> ggram_hidden;              // per ggram layer, [T, H]
  std::vector<nn::AttentionRecord> ggram_attention;  // per ggram layer
  std::vector<nn::Tensor> token_hidden;  // per token layer, pre-fusion [N, H]
  std::vector<nn::Tensor> fused_hidden;  // per token layer, post-fusion; same
                                         // node as token_hidden above the last
                                         // fused layer
  nn::Tensor final_hidden;               // fused_hidden.back()
};

// Runs the ggram ids through the position-free encoder and returns each
// layer's output. Empty ids yield an empty vector.
std::vector<nn::Tensor> ggram_encoder_forward(const ModelState& state,
                                              std::span<const int> ggram_ids,
                                              ForwardTrace* trace = nullptr);

// Token encoder with per-layer enhancement: for layer l in [1, ggram_layers]
// the block output o picks up m·ggram_hidden[l-1] and the sum feeds the next
// block; higher layers run plain. pad_mask (0 = padding, 1 = real), when
// nonempty, must have one entry per token and hides padded keys.
nn::Tensor e4bu_forward(const ModelState& state, std::span<const int> token_ids,
                        const ggram::MatchingMatrix& m,
                        std::span<const nn::Tensor> ggram_hidden,
                        std::span<const int> pad_mask = {},
                        ForwardTrace* trace = nullptr);

// Convenience: ggram encoder over the matched ids, then the fused token
// encoder. matches.source_len must equal token_ids.size().
nn::Tensor dnazen_forward(const ModelState& state, std::span<const int> token_ids,
                          const ggram::GGramMatchSet& matches,
                          ForwardTrace* trace = nullptr);

nn::Tensor mlm_logits(const ModelState& state, const nn::Tensor& hidden);

// Classifier logits [1, num_classes] from the first (CLS) position.
nn::Tensor classify(const ModelState& state, const ForwardTrace& trace);

// Mean attention mass received by each ggram, per ggram-encoder layer,
// averaged over heads and query positions. Each layer's weights sum to 1.
std::vector<std::vector<double>> ggram_attention_summary(const ForwardTrace& trace);

// Checkpoint archive with the config in the manifest. Loading validates every
// named tensor and reports all missing/unexpected/misshapen entries at once.
void save_model(const std::filesystem::path& path, const ModelState& state);
ModelState load_model(const std::filesystem::path& path);

}  // namespace dnazen::model
