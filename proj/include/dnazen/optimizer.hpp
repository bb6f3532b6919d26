#pragma once

#include <cstdint>
#include <vector>

#include "dnazen/tensor.hpp"

namespace dnazen::nn {

struct AdamConfig {
  double lr = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam with bias correction over a fixed parameter list. A step
// whose gradients contain non-finite values is skipped entirely (parameters
// and moments untouched) and counted.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig cfg);

  // Applies one update from the gradients currently accumulated on the
  // parameters, then zeroes them. Returns false when the step was skipped.
  bool step();

  void zero_grad();
  void set_lr(double lr) { cfg_.lr = lr; }
  double lr() const { return cfg_.lr; }
  int64_t steps_taken() const { return steps_; }
  int64_t steps_skipped() const { return skipped_; }

 private:
  std::vector<Tensor> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  int64_t steps_ = 0;
  int64_t skipped_ = 0;
};

}  // namespace dnazen::nn
