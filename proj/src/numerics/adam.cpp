#include "sgn/numerics/adam.hpp"

#include <cmath>
#include <string>

#include "sgn/error.hpp"

namespace sgn {

template <typename T>
void adam_step(std::span<Tensor<T>> params, AdamState<T>& state) {
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.numel(), T(0));
      state.second_moment.emplace_back(p.numel(), T(0));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ConfigError("adam: optimizer state tracks " + std::to_string(state.first_moment.size()) +
                      " tensors, got " + std::to_string(params.size()));
  }
  state.step += 1;
  const T t = static_cast<T>(state.step);
  const T correction1 = T(1) - std::pow(state.beta1, t);
  const T correction2 = T(1) - std::pow(state.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = params[i];
    if (!p.requires_grad()) continue;
    if (!p.has_grad()) throw ConfigError("adam: no gradient for parameter " + std::to_string(i));
    auto theta = p.mutable_values();
    auto grad = p.grad();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    if (m.size() != theta.size()) throw ConfigError("adam: state shape mismatch for parameter " + std::to_string(i));
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const T g = grad[j] + state.weight_decay * theta[j];
      m[j] = state.beta1 * m[j] + (T(1) - state.beta1) * g;
      v[j] = state.beta2 * v[j] + (T(1) - state.beta2) * g * g;
      const T m_hat = m[j] / correction1;
      const T v_hat = v[j] / correction2;
      theta[j] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

template void adam_step(std::span<Tensor<float>>, AdamState<float>&);
template void adam_step(std::span<Tensor<double>>, AdamState<double>&);

}  // namespace sgn
