#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dnazen/tensor.hpp"

namespace dnazen::testutil {

struct GradCheckResult {
  bool ok = true;
  double max_rel = 0.0;       // worst |analytic-numeric| / max(|analytic|,|numeric|)
  double max_abs_diff = 0.0;
  std::string worst;          // "param i elem j: analytic vs numeric"
};

// Central-difference check: forward() must rebuild the graph from the live
// parameter values and return a scalar loss. Comparison uses
// |a-n| <= atol + rtol*max(|a|,|n|), the standard two-sided tolerance.
inline GradCheckResult grad_check(const std::vector<nn::Tensor>& params,
                                  const std::function<nn::Tensor()>& forward,
                                  double eps = 1e-3, double rtol = 1e-2,
                                  double atol = 1e-4) {
  GradCheckResult result;

  for (auto& p : params) const_cast<nn::Tensor&>(p).zero_grad();
  nn::backward(forward());
  std::vector<std::vector<float>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) {
    auto g = p.grad();
    analytic.emplace_back(g.begin(), g.end());
  }

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = const_cast<nn::Tensor&>(params[i]).values();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const float orig = values[j];
      values[j] = static_cast<float>(orig + eps);
      const double up = forward().item();
      values[j] = static_cast<float>(orig - eps);
      const double down = forward().item();
      values[j] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[i][j];
      const double diff = std::abs(a - numeric);
      const double scale = std::max(std::abs(a), std::abs(numeric));
      const double rel = scale > 0.0 ? diff / scale : 0.0;
      if (diff > result.max_abs_diff) result.max_abs_diff = diff;
      if (rel > result.max_rel && diff > atol) result.max_rel = rel;
      if (diff > atol + rtol * scale) {
        result.ok = false;
        result.worst = "param " + std::to_string(i) + " elem " + std::to_string(j) +
                       ": analytic " + std::to_string(a) + " vs numeric " +
                       std::to_string(numeric);
      }
    }
  }
  return result;
}

}  // namespace dnazen::testutil
