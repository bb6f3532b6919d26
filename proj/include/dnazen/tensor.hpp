#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dnazen/common.hpp"
#include "dnazen/rng.hpp"

namespace dnazen::nn {

namespace detail {

struct Node {
  std::vector<int> shape;
  std::vector<float> values;
  std::vector<float> grad;  // sized lazily, same length as values
  bool needs_grad = false;
  bool backward_done = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void()> backprop;  // pulls this->grad into parent grads

  int64_t numel() const { return static_cast<int64_t>(values.size()); }
  std::vector<float>& ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0f);
    return grad;
  }
};

}  // namespace detail

// Eagerly evaluated dense float32 tensor recording a reverse-mode graph.
// Copying a Tensor copies the handle, not the storage.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool needs_grad = false);
  static Tensor full(std::vector<int> shape, float value, bool needs_grad = false);
  static Tensor from_values(std::vector<int> shape, std::vector<float> values,
                            bool needs_grad = false);
  static Tensor randn(std::vector<int> shape, Rng& rng, double stddev,
                      bool needs_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const;
  int rank() const { return static_cast<int>(shape().size()); }
  int dim(int i) const { return shape()[static_cast<std::size_t>(i)]; }
  int64_t numel() const;
  bool needs_grad() const;

  std::span<float> values();
  std::span<const float> values() const;
  // Gradient accumulated by the last backward(); zeros if none flowed.
  std::span<float> grad();
  std::span<const float> grad() const;
  void zero_grad();

  float item() const;  // scalar tensors only

  std::shared_ptr<detail::Node> node() const { return node_; }
  // Wraps an existing node; used by op implementations only.
  static Tensor from_node(std::shared_ptr<detail::Node> node);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

// Elementwise and linear-algebra primitives. All are eager: values are
// computed on construction, gradients on backward().
Tensor add(const Tensor& a, const Tensor& b);            // same shape
Tensor add_bias(const Tensor& m, const Tensor& v);       // [R,C] + [C] broadcast
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);            // elementwise
Tensor scale(const Tensor& a, double c);
Tensor matmul(const Tensor& a, const Tensor& b);         // [R,K]·[K,C]
Tensor matmul_nt(const Tensor& a, const Tensor& b);      // [R,K]·[C,K]^T -> [R,C]
Tensor softmax_rows(const Tensor& x);                    // rows of [R,C]
Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps = 1e-5);
Tensor gelu(const Tensor& x);                            // exact erf form
Tensor embedding_gather(const Tensor& table, std::span<const int> ids);
Tensor slice_rows(const Tensor& x, int begin, int end);
Tensor slice_cols(const Tensor& x, int begin, int end);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor sum_all(const Tensor& x);

// Label value meaning "no loss at this position".
inline constexpr int kIgnoreLabel = -100;

// Mean cross entropy over rows whose label is not kIgnoreLabel; 0 when no
// row qualifies. Stable log-softmax; labels must be in [0, C) or ignored.
Tensor cross_entropy_rows(const Tensor& logits, std::span<const int> labels);

// Reverse-mode accumulation from a scalar loss into every needs_grad node.
// Running backward twice on the same loss without a fresh forward is an error.
void backward(const Tensor& loss);

bool all_finite(std::span<const float> xs);

}  // namespace dnazen::nn
