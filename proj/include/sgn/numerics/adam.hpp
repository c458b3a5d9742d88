#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sgn/numerics/tensor.hpp"

namespace sgn {

template <typename T>
struct AdamState {
  T learning_rate = T(0.001);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T epsilon = T(1e-8);
  // Coupled L2: weight_decay * theta is added to the gradient before the moment updates.
  T weight_decay = T(0);
  std::int64_t step = 0;
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
};

// One bias-corrected Adam update over `params`, reading each tensor's grad slot.
// Moments are zero-initialized on the first call. Tensors without requires_grad
// are skipped; a trainable tensor without a gradient is a ConfigError.
template <typename T>
void adam_step(std::span<Tensor<T>> params, AdamState<T>& state);

}  // namespace sgn
