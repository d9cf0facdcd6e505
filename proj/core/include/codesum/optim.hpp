#pragma once

#include <cstdint>
#include <vector>

#include "codesum/tensor.hpp"

namespace codesum {

struct AdamWConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  double clip_norm = 0.0;  // global gradient-norm clip; 0 disables
};

template <typename T>
struct OptimizerState {
  AdamWConfig config;
  std::uint64_t step = 0;
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
};

template <typename T>
OptimizerState<T> make_optimizer(const ParameterSet<T>& params, const AdamWConfig& config);

// One AdamW update from the gradients stored on `params`, with decoupled weight
// decay: theta -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta).
// Frozen (non-trainable) parameters are skipped.
template <typename T>
void adamw_step(ParameterSet<T>& params, OptimizerState<T>& state);

template <typename T>
double gradient_norm(const ParameterSet<T>& params);

}  // namespace codesum
