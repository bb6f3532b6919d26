#include "dnazen/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace dnazen::nn {

namespace {

int64_t shape_numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ValidationError("negative tensor dimension");
    n *= d;
  }
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

Tensor Tensor::from_node(std::shared_ptr<detail::Node> node) { return Tensor(std::move(node)); }

Tensor Tensor::zeros(std::vector<int> shape, bool needs_grad) {
  const auto n = shape_numel(shape);
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->values.assign(static_cast<std::size_t>(n), 0.0f);
  node->needs_grad = needs_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::full(std::vector<int> shape, float value, bool needs_grad) {
  auto t = zeros(std::move(shape), needs_grad);
  std::fill(t.node_->values.begin(), t.node_->values.end(), value);
  return t;
}

Tensor Tensor::from_values(std::vector<int> shape, std::vector<float> values, bool needs_grad) {
  if (shape_numel(shape) != static_cast<int64_t>(values.size()))
    throw ValidationError("value count does not match shape " + shape_str(shape));
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->needs_grad = needs_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::randn(std::vector<int> shape, Rng& rng, double stddev, bool needs_grad) {
  auto t = zeros(std::move(shape), needs_grad);
  for (auto& v : t.node_->values) v = static_cast<float>(rng.normal(0.0, stddev));
  return t;
}

const std::vector<int>& Tensor::shape() const {
  require(defined(), "undefined tensor");
  return node_->shape;
}

int64_t Tensor::numel() const {
  require(defined(), "undefined tensor");
  return node_->numel();
}

bool Tensor::needs_grad() const { return defined() && node_->needs_grad; }

std::span<float> Tensor::values() {
  require(defined(), "undefined tensor");
  return node_->values;
}

std::span<const float> Tensor::values() const {
  require(defined(), "undefined tensor");
  return node_->values;
}

std::span<float> Tensor::grad() {
  require(defined(), "undefined tensor");
  return node_->ensure_grad();
}

std::span<const float> Tensor::grad() const {
  require(defined(), "undefined tensor");
  return node_->ensure_grad();
}

void Tensor::zero_grad() {
  require(defined(), "undefined tensor");
  auto& g = node_->ensure_grad();
  std::fill(g.begin(), g.end(), 0.0f);
}

float Tensor::item() const {
  require(defined() && numel() == 1, "item() requires a scalar tensor");
  return node_->values[0];
}

namespace {

// Shared glue for defining an op: computes parents' needs_grad union and only
// installs the backprop closure when a gradient can flow.
struct OpBuilder {
  std::shared_ptr<detail::Node> node = std::make_shared<detail::Node>();

  OpBuilder(std::vector<int> shape, std::initializer_list<Tensor> parents) {
    node->shape = std::move(shape);
    node->values.assign(static_cast<std::size_t>(shape_numel(node->shape)), 0.0f);
    for (const auto& p : parents) {
      node->parents.push_back(p.node());
      node->needs_grad = node->needs_grad || p.node()->needs_grad;
    }
  }
  OpBuilder(std::vector<int> shape, std::span<const Tensor> parents) {
    node->shape = std::move(shape);
    node->values.assign(static_cast<std::size_t>(shape_numel(node->shape)), 0.0f);
    for (const auto& p : parents) {
      node->parents.push_back(p.node());
      node->needs_grad = node->needs_grad || p.node()->needs_grad;
    }
  }

  std::span<float> out() { return node->values; }

  Tensor finish(std::function<void()> backprop) {
    if (node->needs_grad) node->backprop = std::move(backprop);
    return Tensor::from_node(std::move(node));
  }
};

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "add: shape mismatch " + shape_str(a.shape()) + " vs " +
                                      shape_str(b.shape()));
  OpBuilder op(a.shape(), {a, b});
  auto out = op.out();
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  auto* self = op.node.get();
  auto an = a.node();
  auto bn = b.node();
  return op.finish([self, an, bn] {
    const auto& g = self->grad;
    if (an->needs_grad) {
      auto& ga = an->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (bn->needs_grad) {
      auto& gb = bn->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
    }
  });
}

Tensor add_bias(const Tensor& m, const Tensor& v) {
  require(m.rank() == 2 && v.rank() == 1 && m.dim(1) == v.dim(0),
          "add_bias: want [R,C] + [C], got " + shape_str(m.shape()) + " + " +
              shape_str(v.shape()));
  const int rows = m.dim(0), cols = m.dim(1);
  OpBuilder op(m.shape(), {m, v});
  auto out = op.out();
  const auto mv = m.values();
  const auto vv = v.values();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out[r * cols + c] = mv[r * cols + c] + vv[c];
  auto* self = op.node.get();
  auto mn = m.node();
  auto vn = v.node();
  return op.finish([self, mn, vn, rows, cols] {
    const auto& g = self->grad;
    if (mn->needs_grad) {
      auto& gm = mn->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gm[i] += g[i];
    }
    if (vn->needs_grad) {
      auto& gv = vn->ensure_grad();
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) gv[c] += g[r * cols + c];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "sub: shape mismatch");
  OpBuilder op(a.shape(), {a, b});
  auto out = op.out();
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  auto* self = op.node.get();
  auto an = a.node();
  auto bn = b.node();
  return op.finish([self, an, bn] {
    const auto& g = self->grad;
    if (an->needs_grad) {
      auto& ga = an->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (bn->needs_grad) {
      auto& gb = bn->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "mul: shape mismatch");
  OpBuilder op(a.shape(), {a, b});
  auto out = op.out();
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  auto* self = op.node.get();
  auto an = a.node();
  auto bn = b.node();
  return op.finish([self, an, bn] {
    const auto& g = self->grad;
    if (an->needs_grad) {
      auto& ga = an->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bn->values[i];
    }
    if (bn->needs_grad) {
      auto& gb = bn->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * an->values[i];
    }
  });
}

Tensor scale(const Tensor& a, double c) {
  OpBuilder op(a.shape(), {a});
  auto out = op.out();
  const auto av = a.values();
  const float cf = static_cast<float>(c);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * cf;
  auto* self = op.node.get();
  auto an = a.node();
  return op.finish([self, an, cf] {
    const auto& g = self->grad;
    auto& ga = an->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * cf;
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.rank() == 2 && b.rank() == 2 && a.dim(1) == b.dim(0),
          "matmul: want [R,K]·[K,C], got " + shape_str(a.shape()) + " · " +
              shape_str(b.shape()));
  const int rows = a.dim(0), inner = a.dim(1), cols = b.dim(1);
  OpBuilder op({rows, cols}, {a, b});
  auto out = op.out();
  const auto av = a.values();
  const auto bv = b.values();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < inner; ++k)
        acc += static_cast<double>(av[r * inner + k]) * bv[k * cols + c];
      out[r * cols + c] = static_cast<float>(acc);
    }
  auto* self = op.node.get();
  auto an = a.node();
  auto bn = b.node();
  return op.finish([self, an, bn, rows, inner, cols] {
    const auto& g = self->grad;
    if (an->needs_grad) {
      auto& ga = an->ensure_grad();
      for (int r = 0; r < rows; ++r)
        for (int k = 0; k < inner; ++k) {
          double acc = 0.0;
          for (int c = 0; c < cols; ++c)
            acc += static_cast<double>(g[r * cols + c]) * bn->values[k * cols + c];
          ga[r * inner + k] += static_cast<float>(acc);
        }
    }
    if (bn->needs_grad) {
      auto& gb = bn->ensure_grad();
      for (int k = 0; k < inner; ++k)
        for (int c = 0; c < cols; ++c) {
          double acc = 0.0;
          for (int r = 0; r < rows; ++r)
            acc += static_cast<double>(an->values[r * inner + k]) * g[r * cols + c];
          gb[k * cols + c] += static_cast<float>(acc);
        }
    }
  });
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require(a.rank() == 2 && b.rank() == 2 && a.dim(1) == b.dim(1),
          "matmul_nt: want [R,K]·[C,K]ᵀ, got " + shape_str(a.shape()) + " · " +
              shape_str(b.shape()));
  const int rows = a.dim(0), inner = a.dim(1), cols = b.dim(0);
  OpBuilder op({rows, cols}, {a, b});
  auto out = op.out();
  const auto av = a.values();
  const auto bv = b.values();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < inner; ++k)
        acc += static_cast<double>(av[r * inner + k]) * bv[c * inner + k];
      out[r * cols + c] = static_cast<float>(acc);
    }
  auto* self = op.node.get();
  auto an = a.node();
  auto bn = b.node();
  return op.finish([self, an, bn, rows, inner, cols] {
    const auto& g = self->grad;
    if (an->needs_grad) {
      auto& ga = an->ensure_grad();
      for (int r = 0; r < rows; ++r)
        for (int k = 0; k < inner; ++k) {
          double acc = 0.0;
          for (int c = 0; c < cols; ++c)
            acc += static_cast<double>(g[r * cols + c]) * bn->values[c * inner + k];
          ga[r * inner + k] += static_cast<float>(acc);
        }
    }
    if (bn->needs_grad) {
      auto& gb = bn->ensure_grad();
      for (int c = 0; c < cols; ++c)
        for (int k = 0; k < inner; ++k) {
          double acc = 0.0;
          for (int r = 0; r < rows; ++r)
            acc += static_cast<double>(g[r * cols + c]) * an->values[r * inner + k];
          gb[c * inner + k] += static_cast<float>(acc);
        }
    }
  });
}

Tensor softmax_rows(const Tensor& x) {
  require(x.rank() == 2, "softmax_rows: want rank-2, got " + shape_str(x.shape()));
  const int rows = x.dim(0), cols = x.dim(1);
  require(cols > 0, "softmax_rows: empty rows");
  OpBuilder op(x.shape(), {x});
  auto out = op.out();
  const auto xv = x.values();
  for (int r = 0; r < rows; ++r) {
    const float* row = &xv[r * cols];
    const float m = *std::max_element(row, row + cols);
    double denom = 0.0;
    for (int c = 0; c < cols; ++c) denom += std::exp(static_cast<double>(row[c]) - m);
    for (int c = 0; c < cols; ++c)
      out[r * cols + c] =
          static_cast<float>(std::exp(static_cast<double>(row[c]) - m) / denom);
  }
  auto* self = op.node.get();
  auto xn = x.node();
  return op.finish([self, xn, rows, cols] {
    const auto& g = self->grad;
    const auto& p = self->values;
    auto& gx = xn->ensure_grad();
    for (int r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < cols; ++c)
        dot += static_cast<double>(g[r * cols + c]) * p[r * cols + c];
      for (int c = 0; c < cols; ++c)
        gx[r * cols + c] += static_cast<float>(
            p[r * cols + c] * (static_cast<double>(g[r * cols + c]) - dot));
    }
  });
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  require(x.rank() == 2 && gain.rank() == 1 && bias.rank() == 1 && gain.dim(0) == x.dim(1) &&
              bias.dim(0) == x.dim(1),
          "layer_norm_rows: want [R,C], [C], [C]");
  const int rows = x.dim(0), cols = x.dim(1);
  OpBuilder op(x.shape(), {x, gain, bias});
  auto out = op.out();
  const auto xv = x.values();
  const auto gv = gain.values();
  const auto bv = bias.values();
  auto xhat = std::make_shared<std::vector<float>>(xv.size());
  auto inv_std = std::make_shared<std::vector<float>>(rows);
  for (int r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (int c = 0; c < cols; ++c) mean += xv[r * cols + c];
    mean /= cols;
    double var = 0.0;
    for (int c = 0; c < cols; ++c) {
      const double d = xv[r * cols + c] - mean;
      var += d * d;
    }
    var /= cols;
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = static_cast<float>(is);
    for (int c = 0; c < cols; ++c) {
      const float xh = static_cast<float>((xv[r * cols + c] - mean) * is);
      (*xhat)[r * cols + c] = xh;
      out[r * cols + c] = xh * gv[c] + bv[c];
    }
  }
  auto* self = op.node.get();
  auto xn = x.node();
  auto gn = gain.node();
  auto bn = bias.node();
  return op.finish([self, xn, gn, bn, rows, cols, xhat, inv_std] {
    const auto& g = self->grad;
    if (gn->needs_grad) {
      auto& gg = gn->ensure_grad();
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) gg[c] += g[r * cols + c] * (*xhat)[r * cols + c];
    }
    if (bn->needs_grad) {
      auto& gb = bn->ensure_grad();
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
    }
    if (xn->needs_grad) {
      auto& gx = xn->ensure_grad();
      for (int r = 0; r < rows; ++r) {
        double mean_dy = 0.0, mean_dy_xhat = 0.0;
        for (int c = 0; c < cols; ++c) {
          const double dy = static_cast<double>(g[r * cols + c]) * gn->values[c];
          mean_dy += dy;
          mean_dy_xhat += dy * (*xhat)[r * cols + c];
        }
        mean_dy /= cols;
        mean_dy_xhat /= cols;
        for (int c = 0; c < cols; ++c) {
          const double dy = static_cast<double>(g[r * cols + c]) * gn->values[c];
          gx[r * cols + c] += static_cast<float>(
              (*inv_std)[r] * (dy - mean_dy - (*xhat)[r * cols + c] * mean_dy_xhat));
        }
      }
    }
  });
}

Tensor gelu(const Tensor& x) {
  OpBuilder op(x.shape(), {x});
  auto out = op.out();
  const auto xv = x.values();
  constexpr double inv_sqrt2 = 0.7071067811865475;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = xv[i];
    out[i] = static_cast<float>(0.5 * v * (1.0 + std::erf(v * inv_sqrt2)));
  }
  auto* self = op.node.get();
  auto xn = x.node();
  return op.finish([self, xn] {
    const auto& g = self->grad;
    auto& gx = xn->ensure_grad();
    constexpr double inv_sqrt2 = 0.7071067811865475;
    constexpr double inv_sqrt2pi = 0.3989422804014327;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = xn->values[i];
      const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
      const double pdf = inv_sqrt2pi * std::exp(-0.5 * v * v);
      gx[i] += static_cast<float>(g[i] * (cdf + v * pdf));
    }
  });
}

Tensor embedding_gather(const Tensor& table, std::span<const int> ids) {
  require(table.rank() == 2, "embedding_gather: table must be [V,H]");
  const int vocab = table.dim(0), width = table.dim(1);
  for (int id : ids)
    if (id < 0 || id >= vocab)
      throw ValidationError("embedding id " + std::to_string(id) + " outside table of " +
                            std::to_string(vocab));
  const int rows = static_cast<int>(ids.size());
  OpBuilder op({rows, width}, {table});
  auto out = op.out();
  const auto tv = table.values();
  for (int r = 0; r < rows; ++r)
    std::copy_n(&tv[static_cast<std::size_t>(ids[r]) * width], width, &out[r * width]);
  auto* self = op.node.get();
  auto tn = table.node();
  auto idv = std::make_shared<std::vector<int>>(ids.begin(), ids.end());
  return op.finish([self, tn, idv, width] {
    const auto& g = self->grad;
    auto& gt = tn->ensure_grad();
    for (std::size_t r = 0; r < idv->size(); ++r)
      for (int c = 0; c < width; ++c)
        gt[static_cast<std::size_t>((*idv)[r]) * width + c] += g[r * width + c];
  });
}

Tensor slice_rows(const Tensor& x, int begin, int end) {
  require(x.rank() == 2 && begin >= 0 && begin < end && end <= x.dim(0),
          "slice_rows: bad range");
  const int cols = x.dim(1), rows = end - begin;
  OpBuilder op({rows, cols}, {x});
  auto out = op.out();
  const auto xv = x.values();
  std::copy_n(&xv[static_cast<std::size_t>(begin) * cols], static_cast<std::size_t>(rows) * cols,
              out.begin());
  auto* self = op.node.get();
  auto xn = x.node();
  return op.finish([self, xn, begin, rows, cols] {
    const auto& g = self->grad;
    auto& gx = xn->ensure_grad();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) gx[(begin + r) * cols + c] += g[r * cols + c];
  });
}

Tensor slice_cols(const Tensor& x, int begin, int end) {
  require(x.rank() == 2 && begin >= 0 && begin < end && end <= x.dim(1),
          "slice_cols: bad range");
  const int rows = x.dim(0), src_cols = x.dim(1), cols = end - begin;
  OpBuilder op({rows, cols}, {x});
  auto out = op.out();
  const auto xv = x.values();
  for (int r = 0; r < rows; ++r)
    std::copy_n(&xv[r * src_cols + begin], cols, &out[r * cols]);
  auto* self = op.node.get();
  auto xn = x.node();
  return op.finish([self, xn, begin, rows, src_cols, cols] {
    const auto& g = self->grad;
    auto& gx = xn->ensure_grad();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) gx[r * src_cols + begin + c] += g[r * cols + c];
  });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat_cols: no parts");
  const int rows = parts[0].dim(0);
  int total = 0;
  for (const auto& p : parts) {
    require(p.rank() == 2 && p.dim(0) == rows, "concat_cols: row mismatch");
    total += p.dim(1);
  }
  OpBuilder op({rows, total}, parts);
  auto out = op.out();
  int offset = 0;
  for (const auto& p : parts) {
    const auto pv = p.values();
    const int cols = p.dim(1);
    for (int r = 0; r < rows; ++r) std::copy_n(&pv[r * cols], cols, &out[r * total + offset]);
    offset += cols;
  }
  auto* self = op.node.get();
  std::vector<std::shared_ptr<detail::Node>> pn;
  std::vector<int> widths;
  for (const auto& p : parts) {
    pn.push_back(p.node());
    widths.push_back(p.dim(1));
  }
  return op.finish([self, pn, widths, rows, total] {
    const auto& g = self->grad;
    int offset = 0;
    for (std::size_t i = 0; i < pn.size(); ++i) {
      const int cols = widths[i];
      if (pn[i]->needs_grad) {
        auto& gp = pn[i]->ensure_grad();
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c) gp[r * cols + c] += g[r * total + offset + c];
      }
      offset += cols;
    }
  });
}

Tensor sum_all(const Tensor& x) {
  OpBuilder op({1}, {x});
  double acc = 0.0;
  for (float v : x.values()) acc += v;
  op.out()[0] = static_cast<float>(acc);
  auto* self = op.node.get();
  auto xn = x.node();
  return op.finish([self, xn] {
    const float g = self->grad[0];
    auto& gx = xn->ensure_grad();
    for (auto& v : gx) v += g;
  });
}

Tensor cross_entropy_rows(const Tensor& logits, std::span<const int> labels) {
  require(logits.rank() == 2, "cross_entropy_rows: want [R,C] logits");
  const int rows = logits.dim(0), cols = logits.dim(1);
  require(static_cast<int>(labels.size()) == rows,
          "cross_entropy_rows: label count != rows");
  for (int lab : labels)
    if (lab != kIgnoreLabel && (lab < 0 || lab >= cols))
      throw ValidationError("label " + std::to_string(lab) + " outside [0," +
                            std::to_string(cols) + ")");
  OpBuilder op({1}, {logits});
  const auto lv = logits.values();
  auto probs = std::make_shared<std::vector<float>>(lv.size(), 0.0f);
  int valid = 0;
  double total = 0.0;
  for (int r = 0; r < rows; ++r) {
    if (labels[r] == kIgnoreLabel) continue;
    ++valid;
    const float* row = &lv[r * cols];
    const float m = *std::max_element(row, row + cols);
    double denom = 0.0;
    for (int c = 0; c < cols; ++c) denom += std::exp(static_cast<double>(row[c]) - m);
    const double log_denom = std::log(denom);
    for (int c = 0; c < cols; ++c)
      (*probs)[r * cols + c] =
          static_cast<float>(std::exp(static_cast<double>(row[c]) - m) / denom);
    total += -(static_cast<double>(row[labels[r]]) - m - log_denom);
  }
  op.out()[0] = valid == 0 ? 0.0f : static_cast<float>(total / valid);
  auto* self = op.node.get();
  auto ln = logits.node();
  auto labv = std::make_shared<std::vector<int>>(labels.begin(), labels.end());
  return op.finish([self, ln, labv, probs, rows, cols, valid] {
    if (valid == 0) return;
    const float g = self->grad[0];
    auto& gl = ln->ensure_grad();
    for (int r = 0; r < rows; ++r) {
      const int lab = (*labv)[r];
      if (lab == kIgnoreLabel) continue;
      for (int c = 0; c < cols; ++c) {
        float d = (*probs)[r * cols + c];
        if (c == lab) d -= 1.0f;
        gl[r * cols + c] += g * d / static_cast<float>(valid);
      }
    }
  });
}

void backward(const Tensor& loss) {
  require(loss.defined() && loss.numel() == 1, "backward: loss must be a scalar tensor");
  auto root = loss.node();
  if (!root->needs_grad)
    throw ValidationError("backward: loss does not depend on any needs_grad tensor");
  if (root->backward_done)
    throw ValidationError("backward: already run for this graph; run a fresh forward first");
  root->backward_done = true;

  // Iterative post-order over parents gives reverse-topological order when
  // walked backwards.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{root.get(), 0}};
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->needs_grad && visited.insert(parent).second) stack.push_back({parent, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->ensure_grad()[0] = 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    node->ensure_grad();
    if (node->backprop) node->backprop();
  }
}

bool all_finite(std::span<const float> xs) {
  return std::all_of(xs.begin(), xs.end(), [](float v) { return std::isfinite(v); });
}

}  // namespace dnazen::nn
