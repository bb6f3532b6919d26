#include "dnazen/transformer.hpp"

#include <cmath>

namespace dnazen::nn {

namespace {
constexpr double kInitStddev = 0.02;
}

std::vector<std::pair<std::string, Tensor>> LayerParams::named() const {
  return {{"attn.wq", wq}, {"attn.bq", bq}, {"attn.wk", wk}, {"attn.bk", bk},
          {"attn.wv", wv}, {"attn.bv", bv}, {"attn.wo", wo}, {"attn.bo", bo},
          {"ln1.g", ln1_g}, {"ln1.b", ln1_b}, {"ffn.w1", ff1_w}, {"ffn.b1", ff1_b},
          {"ffn.w2", ff2_w}, {"ffn.b2", ff2_b}, {"ln2.g", ln2_g}, {"ln2.b", ln2_b}};
}

std::vector<Tensor> LayerParams::tensors() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named()) {
    (void)name;
    out.push_back(t);
  }
  return out;
}

LayerParams make_layer(int hidden, int heads, Rng& rng) {
  if (hidden <= 0 || heads <= 0 || hidden % heads != 0)
    throw ConfigError("layer wants heads dividing hidden, got hidden=" +
                      std::to_string(hidden) + " heads=" + std::to_string(heads));
  LayerParams p;
  p.hidden = hidden;
  p.heads = heads;
  const int ff = 4 * hidden;
  const auto w = [&](int r, int c) { return Tensor::randn({r, c}, rng, kInitStddev, true); };
  const auto b = [&](int n) { return Tensor::zeros({n}, true); };
  p.wq = w(hidden, hidden);
  p.bq = b(hidden);
  p.wk = w(hidden, hidden);
  p.bk = b(hidden);
  p.wv = w(hidden, hidden);
  p.bv = b(hidden);
  p.wo = w(hidden, hidden);
  p.bo = b(hidden);
  p.ln1_g = Tensor::full({hidden}, 1.0f, true);
  p.ln1_b = b(hidden);
  p.ff1_w = w(hidden, ff);
  p.ff1_b = b(ff);
  p.ff2_w = w(ff, hidden);
  p.ff2_b = b(hidden);
  p.ln2_g = Tensor::full({hidden}, 1.0f, true);
  p.ln2_b = b(hidden);
  return p;
}

Tensor transformer_layer_forward(const LayerParams& params, const Tensor& x,
                                 const Tensor& mask_bias, AttentionRecord* attn,
                                 int layer_index) {
  const int n = x.dim(0);
  const int hidden = params.hidden;
  if (x.rank() != 2 || x.dim(1) != hidden)
    throw ValidationError("layer input must be [T," + std::to_string(hidden) + "]");
  if (mask_bias.defined()) {
    const bool row_ok = mask_bias.rank() == 1 && mask_bias.dim(0) == n;
    const bool full_ok =
        mask_bias.rank() == 2 && mask_bias.dim(0) == n && mask_bias.dim(1) == n;
    if (!row_ok && !full_ok) throw ValidationError("attention mask shape mismatch");
  }

  const int heads = params.heads;
  const int head_dim = hidden / heads;
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  const Tensor q = add_bias(matmul(x, params.wq), params.bq);
  const Tensor k = add_bias(matmul(x, params.wk), params.bk);
  const Tensor v = add_bias(matmul(x, params.wv), params.bv);

  if (attn) {
    attn->heads = heads;
    attn->queries = n;
    attn->keys = n;
    attn->probs.assign(static_cast<std::size_t>(heads) * n * n, 0.0f);
  }

  std::vector<Tensor> contexts;
  contexts.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    const int lo = h * head_dim, hi = (h + 1) * head_dim;
    const Tensor qh = slice_cols(q, lo, hi);
    const Tensor kh = slice_cols(k, lo, hi);
    const Tensor vh = slice_cols(v, lo, hi);
    Tensor scores = scale(matmul_nt(qh, kh), att_scale);
    if (mask_bias.defined())
      scores = mask_bias.rank() == 1 ? add_bias(scores, mask_bias) : add(scores, mask_bias);
    const Tensor probs = softmax_rows(scores);
    if (attn)
      std::copy(probs.values().begin(), probs.values().end(),
                attn->probs.begin() + static_cast<std::size_t>(h) * n * n);
    contexts.push_back(matmul(probs, vh));
  }
  const Tensor ctx = concat_cols(contexts);
  const Tensor attn_out = add_bias(matmul(ctx, params.wo), params.bo);
  const Tensor normed1 = layer_norm_rows(add(x, attn_out), params.ln1_g, params.ln1_b);

  const Tensor ff_hidden = gelu(add_bias(matmul(normed1, params.ff1_w), params.ff1_b));
  const Tensor ff_out = add_bias(matmul(ff_hidden, params.ff2_w), params.ff2_b);
  const Tensor out = layer_norm_rows(add(normed1, ff_out), params.ln2_g, params.ln2_b);

  if (!all_finite(out.values()))
    throw NumericError("non-finite activations in encoder layer " +
                       std::to_string(layer_index));
  return out;
}

}  // namespace dnazen::nn
