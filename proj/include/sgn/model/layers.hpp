#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "sgn/numerics/tensor.hpp"

namespace sgn {

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
template <typename T>
Tensor<T> uniform_init(Shape shape, std::size_t fan_in, std::mt19937_64& rng);

template <typename T>
class Linear {
 public:
  Linear(std::size_t in_features, std::size_t out_features, bool with_bias, std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& x) const;

  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }
  std::size_t in_features() const { return weight_.dim(1); }
  std::size_t out_features() const { return weight_.dim(0); }

  void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const;

 private:
  Tensor<T> weight_;
  Tensor<T> bias_;
};

// Two fully connected layers with ReLU after each: relu(W2 relu(W1 x + b1) + b2).
// Shared shape of every embedding in the network (dynamics branches, joint type, frame index).
template <typename T>
class EmbedMLP {
 public:
  EmbedMLP(std::size_t in_features, std::size_t hidden, std::size_t out_features, std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& x) const;

  Linear<T>& first() { return first_; }
  Linear<T>& second() { return second_; }
  std::size_t in_features() const { return first_.in_features(); }
  std::size_t out_features() const { return second_.out_features(); }

  void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const;

 private:
  Linear<T> first_;
  Linear<T> second_;
};

}  // namespace sgn
