#include "dnazen/optimizer.hpp"

#include <cmath>

namespace dnazen::nn {

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  if (cfg_.lr < 0.0) throw ConfigError("negative learning rate");
  if (cfg_.beta1 < 0.0 || cfg_.beta1 >= 1.0 || cfg_.beta2 < 0.0 || cfg_.beta2 >= 1.0)
    throw ConfigError("Adam betas must lie in [0,1)");
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(p.numel(), 0.0);
    v_.emplace_back(p.numel(), 0.0);
  }
}

bool Adam::step() {
  for (auto& p : params_)
    if (!all_finite(p.grad())) {
      ++skipped_;
      zero_grad();
      return false;
    }

  ++steps_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto values = params_[i].values();
    const auto grads = params_[i].grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = grads[j];
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g;
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g * g;
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      values[j] = static_cast<float>(values[j] - cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps));
    }
  }
  zero_grad();
  return true;
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace dnazen::nn
