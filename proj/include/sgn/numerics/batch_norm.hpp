#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sgn/numerics/tensor.hpp"

namespace sgn {

enum class Mode { train, eval };

// Per-channel batch normalization over the trailing (channel) axis. In train
// mode statistics come from every leading position of the batch and the
// running estimates are updated; in eval mode the layer is a fixed affine map.
template <typename T>
class BatchNorm {
 public:
  explicit BatchNorm(std::size_t channels, T momentum = T(0.1), T epsilon = T(1e-5));

  Tensor<T> forward(const Tensor<T>& x);

  void set_mode(Mode mode) { mode_ = mode; }
  Mode mode() const { return mode_; }
  std::size_t channels() const { return gamma_.numel(); }

  Tensor<T>& gamma() { return gamma_; }
  Tensor<T>& beta() { return beta_; }
  Tensor<T>& running_mean() { return running_mean_; }
  Tensor<T>& running_var() { return running_var_; }
  T momentum() const { return momentum_; }
  T epsilon() const { return epsilon_; }

  void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const;

 private:
  Tensor<T> gamma_;
  Tensor<T> beta_;
  Tensor<T> running_mean_;
  Tensor<T> running_var_;
  T momentum_;
  T epsilon_;
  Mode mode_ = Mode::train;
};

}  // namespace sgn
