#pragma once

#include <string>
#include <vector>

#include "dnazen/rng.hpp"
#include "dnazen/tensor.hpp"

namespace dnazen::nn {

// One post-norm encoder block: self-attention -> residual -> norm ->
// GELU feed-forward (4x widening) -> residual -> norm.
struct LayerParams {
  int hidden = 0;
  int heads = 0;
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;
  Tensor ln1_g, ln1_b;
  Tensor ff1_w, ff1_b, ff2_w, ff2_b;
  Tensor ln2_g, ln2_b;

  // Stable iteration order used by the optimizer and checkpoints.
  std::vector<std::pair<std::string, Tensor>> named() const;
  std::vector<Tensor> tensors() const;
};

LayerParams make_layer(int hidden, int heads, Rng& rng);

// Attention probabilities captured during a forward pass, [head][query][key].
struct AttentionRecord {
  int heads = 0;
  int queries = 0;
  int keys = 0;
  std::vector<float> probs;

  float at(int h, int q, int k) const {
    return probs[(static_cast<std::size_t>(h) * queries + q) * keys + k];
  }
};

// mask_bias is additive on attention scores before softmax: rank-1 [keys]
// applies to every query, rank-2 [queries,keys] applies per query; an
// undefined tensor means no mask. Throws NumericError naming layer_index if
// the block produces non-finite activations.
Tensor transformer_layer_forward(const LayerParams& params, const Tensor& x,
                                 const Tensor& mask_bias = {},
                                 AttentionRecord* attn = nullptr, int layer_index = 0);

}  // namespace dnazen::nn
